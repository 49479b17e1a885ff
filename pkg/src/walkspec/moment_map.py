"""Experiments on the moment map ``kappa -> (I_1, ..., I_N)``.

Points live on the affine slice ``X_{e,f}`` of coefficient vectors
``(kappa_{-e}, ..., kappa_f)`` with total mass 1 and mean 0.  Everything
is exact rational arithmetic except the numerical locations reported by
:func:`morse_certificate`.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import mpmath
import numpy as np
import sympy

from ._numeric import DEFAULT_PRECISION, to_fraction, to_mpf, working_precision
from .errors import PrecisionExhausted, SearchSpaceTooLarge, ValidationError
from .spectrum import return_probabilities
from .walk_core import WalkShape, new_shape, reindex, scale_equivalents, support_gcd

TRANSPOSITION, DEGENERATE, INCONCLUSIVE = "Transposition", "Degenerate", "Inconclusive"

# sampled proportions are rounded to this grid before the exact projection
SAMPLE_GRID = 1 << 20


@dataclass(frozen=True)
class ParameterPoint:
    """``kappas[i]`` is the coefficient of ``t**(i - e)``."""

    e: int
    f: int
    kappas: Tuple[Fraction, ...]

    @property
    def coeffs(self) -> Dict[int, Fraction]:
        return {i - self.e: c for i, c in enumerate(self.kappas)}

    @property
    def in_simplex(self) -> bool:
        return all(c >= 0 for c in self.kappas)

    @property
    def mass(self) -> Fraction:
        return sum(self.kappas, Fraction(0))

    @property
    def mean(self) -> Fraction:
        return sum((k * c for k, c in self.coeffs.items()), Fraction(0))

    def to_shape(self) -> WalkShape:
        return new_shape({k: c for k, c in self.coeffs.items() if c})

    @classmethod
    def from_shape(cls, shape: WalkShape) -> "ParameterPoint":
        e, f = shape.e, shape.f
        return cls(e, f, tuple(shape[k] for k in range(-e, f + 1)))


def _as_point(obj: Union[WalkShape, ParameterPoint]) -> ParameterPoint:
    return obj if isinstance(obj, ParameterPoint) else ParameterPoint.from_shape(obj)


def tangent_basis(e: int, f: int) -> List[Dict[int, Fraction]]:
    """Basis of the directions keeping mass and mean fixed, one per interior exponent.

    The vector for ``k`` is ``unit_k + (k-f)/(e+f) unit_{-e} - (k+e)/(e+f) unit_f``.
    """
    n = e + f
    out = []
    for k in range(-e + 1, f):
        out.append({k: Fraction(1), -e: Fraction(k - f, n), f: Fraction(-(k + e), n)})
    return out


def sample(e: int, f: int, seed: int, simplex_only: bool = True, spread: float = 0.1) -> ParameterPoint:
    """Random point of ``X_{e,f}``, reproducible from ``seed`` (PCG64).

    Simplex mode draws Dirichlet(1) proportions from exponential spacings,
    rounds them to multiples of ``2**-20``, and rescales the two sides so the
    mean vanishes; the result is exact and strictly positive at ``-e`` and
    ``f``.  Otherwise a Gaussian step of size ``spread`` along the tangent
    basis is added to such a point, so coefficients may be negative.
    """
    if e < 1 or f < 1:
        raise ValidationError("e and f must be positive")
    rng = np.random.Generator(np.random.PCG64(seed))
    raw = rng.exponential(size=e + f + 1)
    w = [Fraction(int(round(x * SAMPLE_GRID)) + 1, SAMPLE_GRID) for x in raw]
    k0 = w[e] / sum(w, Fraction(0))
    plus = {k: w[k + e] for k in range(1, f + 1)}
    minus = {k: w[k + e] for k in range(-e, 0)}
    m_plus, m_minus = sum(plus.values()), sum(minus.values())
    mu_plus = sum(k * c for k, c in plus.items())
    mu_minus = -sum(k * c for k, c in minus.items())
    # scale sides by alpha, beta with alpha mu_plus = beta mu_minus and the masses filling 1 - k0
    alpha = (1 - k0) / (m_plus + m_minus * mu_plus / mu_minus)
    beta = alpha * mu_plus / mu_minus
    coeffs = {0: k0}
    coeffs.update({k: alpha * c for k, c in plus.items()})
    coeffs.update({k: beta * c for k, c in minus.items()})
    if not simplex_only:
        for vec in tangent_basis(e, f):
            g = Fraction(int(round(rng.normal(0, spread) * SAMPLE_GRID)), SAMPLE_GRID)
            for k, c in vec.items():
                coeffs[k] += g * c
    return ParameterPoint(e, f, tuple(coeffs[k] for k in range(-e, f + 1)))


def _laurent_powers(coeffs: Dict[int, Fraction], N: int) -> List[Dict[int, Fraction]]:
    """``[chi**0, ..., chi**N]`` as exponent maps."""
    out = [{0: Fraction(1)}]
    for _ in range(N):
        prev = out[-1]
        new: Dict[int, Fraction] = {}
        for a, ca in prev.items():
            for b, cb in coeffs.items():
                new[a + b] = new.get(a + b, Fraction(0)) + ca * cb
        out.append(new)
    return out


def moment_values(point: Union[WalkShape, ParameterPoint], N: int) -> List[Fraction]:
    """``I_1..I_N`` as polynomials evaluated at a point (coefficients may be negative)."""
    p = _as_point(point)
    return [P.get(0, Fraction(0)) for P in _laurent_powers(p.coeffs, N)[1:]]


def moment_jacobian(point: Union[WalkShape, ParameterPoint], N: Optional[int] = None,
                    restricted: bool = True) -> List[List[Fraction]]:
    """Exact Jacobian of ``(I_1..I_N)``.

    ``dI_n/dkappa_k = n [t**-k] chi**(n-1)``.  The restricted form has one
    column per tangent basis vector (``e + f - 1`` columns); the full form
    one column per exponent ``-e..f``.  ``N`` defaults to ``e + f + 1``.
    """
    p = _as_point(point)
    e, f = p.e, p.f
    if N is None:
        N = e + f + 1
    if N < 1:
        raise ValueError("N must be at least 1")
    powers = _laurent_powers(p.coeffs, N - 1)
    full = [[n * powers[n - 1].get(-k, Fraction(0)) for k in range(-e, f + 1)] for n in range(1, N + 1)]
    if not restricted:
        return full
    basis = tangent_basis(e, f)
    return [[sum((row[k + e] * c for k, c in vec.items()), Fraction(0)) for vec in basis] for row in full]


def exact_rank(matrix: Sequence[Sequence[Fraction]]) -> int:
    if not matrix or not matrix[0]:
        return 0
    return sympy.Matrix([[sympy.Rational(c.numerator, c.denominator) for c in row] for row in matrix]).rank()


@dataclass(frozen=True)
class MorseCertificate:
    critical_points: Tuple[Tuple[complex, complex], ...]
    verdict: str
    squarefree_critical_points: bool
    distinct_critical_values: bool

    def to_json(self) -> dict:
        def c(z):
            return [mpmath.nstr(z.real, 20), mpmath.nstr(z.imag, 20)]
        return {
            "schema": "walkspec.morse/1",
            "verdict": self.verdict,
            "critical_points": [{"t": c(t), "value": c(v)} for t, v in self.critical_points],
            "nondegenerate": self.squarefree_critical_points,
            "distinct_values": self.distinct_critical_values,
        }


def _numerator_polys(p: ParameterPoint):
    t, u = sympy.symbols("t u")
    coeffs = p.coeffs
    d = math.lcm(*(c.denominator for c in coeffs.values() if c))
    e = p.e
    # t**e chi(t) and t**(e+1) chi'(t), scaled to integers
    num = sum(int(c * d) * t ** (k + e) for k, c in coeffs.items() if c)
    crit = sum(int(k * c * d) * t ** (k + e) for k, c in coeffs.items() if c and k)
    return t, u, sympy.Poly(num, t), sympy.Poly(crit, t), d


def morse_certificate(point: Union[WalkShape, ParameterPoint], precision: int = DEFAULT_PRECISION,
                      method: str = "exact") -> MorseCertificate:
    """Check that every finite critical point of ``chi`` is simple and that the
    critical values are pairwise distinct.

    ``exact``: with ``P = t**(e+1) chi'(t)`` (scaled to integers) the points
    are simple iff ``P`` is squarefree, and the values are distinct iff
    ``Res_t(t**e (chi(t) - u), P)`` is squarefree in ``u``.  Locations are
    reported from a numerical root finder either way.  ``numeric`` decides
    from the computed roots alone, answering ``Inconclusive`` when the
    separations are neither clearly large nor clearly zero.
    """
    p = _as_point(point)
    t, u, num, crit, d = _numerator_polys(p)
    with working_precision(precision):
        # repeated roots defeat the iteration, so solve each squarefree factor
        roots = []
        for factor, mult in crit.sqf_list()[1]:
            if factor.degree() < 1:
                continue
            coeffs = [int(c) for c in factor.all_coeffs()]
            try:
                found = mpmath.polyroots(coeffs, maxsteps=200, extraprec=2 * precision) if len(coeffs) > 2 \
                    else [mpmath.mpf(-coeffs[1]) / coeffs[0]]
            except mpmath.libmp.libhyper.NoConvergence:
                raise PrecisionExhausted("critical points did not converge") from None
            roots.extend(z for z in found for _ in range(mult))
        chi = p.coeffs

        def value(z):
            return mpmath.fsum(to_mpf(c) * z ** k for k, c in chi.items() if c)

        def second(z):
            return mpmath.fsum(k * (k - 1) * to_mpf(c) * z ** (k - 2) for k, c in chi.items() if c)

        points = tuple((z, value(z)) for z in roots)
        if method == "exact":
            simple = sympy.degree(sympy.gcd(crit, crit.diff(t)), t) == 0
            res = sympy.Poly(sympy.resultant(num.as_expr() - d * u * t ** p.e, crit.as_expr(), t), u)
            distinct = sympy.degree(sympy.gcd(res, res.diff(u)), u) == 0
            verdict = TRANSPOSITION if (simple and distinct) else DEGENERATE
            return MorseCertificate(points, verdict, simple, distinct)
        if method != "numeric":
            raise ValueError(f"unknown method {method!r}")
        small = mpmath.mpf(2) ** (16 - precision)
        large = mpmath.mpf(2) ** (-precision // 4)
        sep = min((abs(a[1] - b[1]) for a, b in itertools.combinations(points, 2)), default=mpmath.inf)
        curv = min((abs(second(z)) for z, _ in points), default=mpmath.inf)
        root_sep = min((abs(a[0] - b[0]) for a, b in itertools.combinations(points, 2)), default=mpmath.inf)
        if sep > large and curv > large and root_sep > large:
            return MorseCertificate(points, TRANSPOSITION, True, True)
        if sep < small or curv < small or root_sep < small:
            return MorseCertificate(points, DEGENERATE, curv >= small and root_sep >= small, sep >= small)
        return MorseCertificate(points, INCONCLUSIVE, curv > large, sep > large)


def excluded_locus_examples() -> Dict[str, WalkShape]:
    """Shapes whose critical data fail the transposition test by construction.

    * ``double_double``: ``t**2 chi(t)`` is ``(t+2)**2 (t+3)**2 (1+5t) / 864``;
      two double zeros share the critical value 0, and ``1+5t`` makes it unbiased.
    * ``double_double_constant``: the same with a constant cofactor,
      ``(t+2)**2 (t+3)**2 / 144``; biased.
    * ``triple_zero``: ``(t+1)**4 / (16 t**2)``; ``chi'`` has a triple zero at -1.
    """
    t = sympy.symbols("t")

    def from_numerator(expr, e, scale):
        poly = sympy.Poly(sympy.expand(expr), t)
        coeffs = {}
        for (deg,), c in poly.terms():
            coeffs[deg - e] = Fraction(int(c), scale)
        return new_shape(coeffs)

    return {
        "double_double": from_numerator((t + 2) ** 2 * (t + 3) ** 2 * (1 + 5 * t), 2, 864),
        "double_double_constant": from_numerator((t + 2) ** 2 * (t + 3) ** 2, 2, 144),
        "triple_zero": from_numerator((t + 1) ** 4, 2, 16),
    }


# -- brute-force search for isospectral pairs --------------------------------------

def _grid_shapes(e: int, f: int, d: int) -> Iterator[WalkShape]:
    """Shapes on ``[-e, f]`` with coefficients in ``(1/d) Z``, extreme ones positive."""
    parts = e + f + 1
    # compositions of d into `parts` nonnegative parts with first and last >= 1
    inner = d - 2
    if inner < 0:
        return
    for bars in itertools.combinations(range(inner + parts - 1), parts - 1):
        counts = []
        prev = -1
        for b in bars:
            counts.append(b - prev - 1)
            prev = b
        counts.append(inner + parts - 2 - prev)
        counts[0] += 1
        counts[-1] += 1
        yield new_shape({k - e: Fraction(c, d) for k, c in enumerate(counts) if c})


def grid_size(e: int, f: int, denominator_bound: int) -> int:
    parts = e + f + 1
    return sum(math.comb(d - 2 + parts - 1, parts - 1) for d in range(2, denominator_bound + 1))


def _reduced(shape: WalkShape) -> WalkShape:
    g = support_gcd(shape)
    if g == 1:
        return shape
    return new_shape({k // g: c for k, c in shape.items})


def related(a: WalkShape, b: WalkShape, exclude_rescalings: bool = True) -> bool:
    """Whether ``b`` comes from ``a`` by reflection, reindexing or (optionally)
    a rational rescaling ``t -> lambda t`` with ``chi(lambda) = 1``."""
    ra, rb = _reduced(a), _reduced(b)
    targets = [ra.items, reindex(ra, -1).items]
    if rb.items in targets:
        return True
    if not exclude_rescalings:
        return False
    for lam, scaled in scale_equivalents(ra, precision=64):
        if isinstance(lam, Fraction):
            if rb.items in (scaled.items, reindex(scaled, -1).items):
                return True
    return False


@dataclass(frozen=True)
class SearchHit:
    first: WalkShape
    second: WalkShape
    block: int

    def to_json(self) -> dict:
        return {"cursor": self.block, "pair": [self.first.to_json()["coeffs"], self.second.to_json()["coeffs"]]}


def iter_search(e: int, f: int, N_moments: int, denominator_bound: int, unbiased: bool = True,
                exclude_rescalings: bool = True, max_cells: int = 2_000_000,
                start_block: int = 2) -> Iterator[Tuple[int, List[SearchHit]]]:
    """Stream ``(block, hits)`` per common denominator ``block = 2..bound``.

    Blocks before ``start_block`` are enumerated without reporting, so a
    search can be resumed from a cursor.
    """
    size = grid_size(e, f, denominator_bound)
    if size > max_cells:
        raise SearchSpaceTooLarge(f"{size} grid shapes exceed the limit of {max_cells}")
    seen: Dict[Tuple, List[WalkShape]] = {}
    known = set()
    for d in range(2, denominator_bound + 1):
        hits = []
        for shape in _grid_shapes(e, f, d):
            if shape.items in known:
                continue
            known.add(shape.items)
            if unbiased and not shape.unbiased:
                continue
            key = return_probabilities(shape, N_moments).values
            bucket = seen.setdefault(key, [])
            for other in bucket:
                if not related(other, shape, exclude_rescalings):
                    hits.append(SearchHit(other, shape, d))
            bucket.append(shape)
        if d >= start_block:
            yield d, hits


def search_isospectral(e: int, f: int, N_moments: int, denominator_bound: int, unbiased: bool = True,
                       exclude_rescalings: bool = True, max_cells: int = 2_000_000) -> List[Tuple[WalkShape, WalkShape]]:
    """All pairs of grid shapes on ``X_{e,f}`` with equal ``I_1..I_N`` that are
    not related by reflection, reindexing or rational rescaling."""
    out = []
    for _, hits in iter_search(e, f, N_moments, denominator_bound, unbiased, exclude_rescalings, max_cells):
        out.extend((h.first, h.second) for h in hits)
    return out
