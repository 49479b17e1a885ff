"""
Large-s behaviour of the Poissonized spectrum
=============================================

``L(s) = sum_n I_n s**n e**-s / n!`` decays like ``s**-1/2`` for an
unbiased walk.  The correction terms ``A_l`` are polynomials in the
normalized moments ``rho_k = J_k / J_2**(k/2)``.
"""

# %%
import mpmath

from walkspec import evaluate_L, expansion, lazy_walk, simple_walk, symbolic_A, verify_expansion

for l, poly in enumerate(symbolic_A(2)):
    print(f"A_{l} =", poly)

# %%
# For the simple walk ``L(s) = e**-s I_0(s)``, a modified Bessel function,
# so the expansion can be checked against a known closed form.
exp_ = expansion(simple_walk(), 3)
print([str(c) for c in exp_.coefficients])
with mpmath.workprec(128):
    s = 400
    print(evaluate_L(simple_walk(), s), mpmath.exp(-s) * mpmath.besseli(0, s), exp_.partial_sum(s))

# %%
# The lazy walk has ``J_2 = 1/2``, which separates the two natural guesses
# for the leading constant; a fit of the computed values picks one of them.
report = verify_expansion(lazy_walk(), 1, [50, 100, 200, 400, 800])
print(report.selected_prefactor, report.prefactor_deviation)
print("fitted A_1:", report.fitted_A.values[1])

# %%
# The real-exponential variant flips the sign of every odd-order term.
tilde = verify_expansion(simple_walk(), 2, [200, 400, 800, 1600, 3200], precision=160, tilde=True)
print("tilde A_1:", tilde.fitted_A.values[1], "plain A_1 = 1/8")
