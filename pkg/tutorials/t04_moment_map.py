"""
The moment map on a parameter slice
===================================

Shapes supported on ``[-e, f]`` with mass one and mean zero form an affine
slice of dimension ``e + f - 1``.  The map to ``(I_1, ..., I_N)`` is
polynomial, so its Jacobian and critical data can be computed exactly.
"""

# %%
from walkspec.moment_map import (exact_rank, excluded_locus_examples, moment_jacobian, morse_certificate,
                                 sample, search_isospectral)

p = sample(2, 3, seed=7)
print(p.kappas, p.mass, p.mean)
print("rank", exact_rank(moment_jacobian(p)), "of", p.e + p.f - 1)

# %%
# Simple critical points with distinct critical values.
cert = morse_certificate(p.to_shape(), precision=64)
print(cert.verdict, cert.squarefree_critical_points, cert.distinct_critical_values)

# %%
# Shapes built to have a double critical value or a triple zero fail the test.
for name, shape in excluded_locus_examples().items():
    print(name, morse_certificate(shape, precision=64).verdict)

# %%
# Exhaustive search over a small rational grid.  No unbiased pair shows up;
# lifting the bias filter and keeping rescalings finds the 3/7, 4/7 pair.
print(search_isospectral(1, 2, 6, 6))
print(search_isospectral(1, 2, 6, 7, unbiased=False, exclude_rescalings=False))
