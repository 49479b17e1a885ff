"""
Exact return probabilities
==========================

A walk shape is a Laurent polynomial ``chi(t) = sum kappa_k t**k`` with
nonnegative rational coefficients summing to one.  Its spectrum is the
sequence of return probabilities ``I_n``, the constant term of ``chi**n``.
"""

# %%
# The simple walk returns only at even times, with central binomial weights.
from fractions import Fraction
from math import comb

from walkspec import new_shape, return_probabilities, scale_equivalents, simple_walk, simulate

spec = return_probabilities(simple_walk(), 8)
print([str(v) for v in spec.values])
assert all(spec[2 * k] == Fraction(comb(2 * k, k), 4 ** k) for k in range(1, 5))

# %%
# Two different shapes can share every return probability.  Substituting
# ``t -> lam t`` keeps constant terms fixed, so whenever ``chi(lam) = 1``
# the rescaled shape is again a probability vector with the same spectrum.
a = new_shape({-1: Fraction(3, 7), 2: Fraction(4, 7)})
b = new_shape({-1: Fraction(6, 7), 2: Fraction(1, 7)})
print(return_probabilities(a, 30) == return_probabilities(b, 30))
for lam, scaled in scale_equivalents(a):
    print("lambda =", lam, "gives", scaled)

# %%
# Both are biased (nonzero mean), which is why the rescaling is possible;
# an unbiased shape has ``chi(lam) > 1`` for every ``lam != 1``.
print(a.mean, b.mean, scale_equivalents(simple_walk()))

# %%
# Monte Carlo estimates agree with the exact values within a few standard
# errors, and a fixed seed reproduces them exactly.
run = simulate(simple_walk(), 4, 200_000, seed=1)
for n, (est, se) in enumerate(zip(run.estimates, run.standard_errors), start=1):
    print(n, est, "+/-", se, "exact", spec[n])
