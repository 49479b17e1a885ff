"""
Branch series and reconstruction
================================

Near ``u = infinity`` the equation ``chi(t) = 1 + u`` has a small root
``alpha_minus`` and a large root ``alpha_plus``.  The series
``gamma = 1 / (alpha chi'(alpha))`` of each branch carries the scale class
of one side of the shape, and the difference ``gamma_plus - gamma_minus``
is determined by the spectrum.
"""

# %%
from fractions import Fraction

from walkspec import (gamma_diff_at_infinity, guarantee, new_shape, reconstruct_e1,
                      reconstruct_from_diff, return_probabilities)
from walkspec.walk_core import max_coefficient_distance

shape = new_shape({-2: Fraction(1, 3), -1: Fraction(1, 6), 1: Fraction(1, 3), 3: Fraction(1, 6)})
print(shape, "mean", shape.mean)
diff = gamma_diff_at_infinity(shape, order=2)
print(diff)

# %%
# The leading coefficient is ``1/e + 1/f`` exactly.
print(diff.coeff_u(-1), Fraction(1, shape.e) + Fraction(1, shape.f))

# %%
# With coprime degrees the two exponent lattices only meet at integers, so
# the difference splits into the two branches and the shape comes back.
# ``kappa_0`` is the first return probability ``I_1``.
kappa0 = return_probabilities(shape, 1)[1]
back = reconstruct_from_diff(diff, shape.e, shape.f, kappa0)
print({k: float(c) for k, c in back.items}, float(max_coefficient_distance(back, shape)))

# %%
# A single negative step allows an exact inversion from ``I_1 .. I_{f+1}``.
one_two = new_shape({-1: Fraction(2, 3), 2: Fraction(1, 3)})
print(reconstruct_e1(return_probabilities(one_two, 3), 2))

# %%
# Which uniqueness statement covers a pair of degrees.
for e, f in [(2, 3), (2, 4), (5, 5)]:
    r = guarantee(e, f)
    print((e, f), r.verdict, [row.group for row, _ in r.table_rows])
