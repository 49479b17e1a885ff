"""Recovering a walk shape from spectral or branch data.

Three routes are offered:

* :func:`reconstruct_e1` inverts the first ``f + 1`` return probabilities
  of a walk with a single negative step, exactly.
* :func:`reconstruct_from_branches` reads the two half-shapes off the
  branch series ``gamma_plus`` and ``gamma_minus`` at infinity and fixes
  their scales with the mass and mean constraints.
* :func:`reconstruct_from_diff` does the same from ``gamma_plus -
  gamma_minus`` when the two exponent lattices do not collide.

:func:`guarantee` reports which uniqueness statement covers a pair of
degrees.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath
from mpmath import mp, mpf

from . import _roots
from ._numeric import (
    DEFAULT_PRECISION,
    format_number,
    is_exact,
    mul,
    to_fraction,
    to_mpf,
    working_precision,
)
from .errors import (
    AmbiguousLattice,
    DegreesEqual,
    Inconsistent,
    InsufficientData,
    MissingOrders,
    NoSolution,
    NotE1,
    ValidationError,
)
from .muller_tables import MullerTableRow, rows_for_n
from .puiseux import (
    INFINITY,
    BranchPair,
    PuiseuxSeries,
    _inverse_in_tau,
    _reciprocal_log_derivative,
    make_series,
    series_compose,
)
from .spectrum import Spectrum, return_probabilities
from .walk_core import WalkShape, new_shape, support_gcd

PLUS, MINUS = "plus", "minus"


@dataclass(frozen=True)
class NormalizedHalfShape:
    """Scale class of one side of a shape.

    ``coeffs[k-1]`` is ``nu_k = kappa_{d-k} kappa_d**(-1+k/d)`` (exponents
    measured outward on the ``minus`` side), for ``k = 1 .. d-1``.
    """

    side: str
    degree: int
    coeffs: Tuple

    def monic(self) -> List:
        """``[1, nu_1, ..., nu_{d-1}]``: coefficients of ``t**d, t**(d-1), ..., t``."""
        return [Fraction(1)] + list(self.coeffs)


def _forward_b(z: Sequence, d: int, precision: int) -> List:
    """Coefficients ``b_1..b_{d-1}`` of ``v**(d+k)`` in the minus-side gamma
    series (in ``v = u**(-1/d)``) for normalized products ``z``."""
    K = d
    G = _inverse_in_tau(list(z) + [mpf(0)] * (K - len(z)), d, K, precision)
    S = _reciprocal_log_derivative(list(z) + [mpf(0)] * (K - len(z)), d, K, precision)
    g = series_compose(S, G)
    return [g.coeff(d + k) for k in range(1, d)]


def half_shape_from_series(gamma: PuiseuxSeries, side: str, degree: int,
                           precision: int = DEFAULT_PRECISION) -> NormalizedHalfShape:
    """Solve the triangular system linking the first ``degree - 1`` subleading
    coefficients of a branch series to the normalized products ``nu_k``.

    The ``k``-th coefficient is affine in ``nu_k`` given ``nu_1..nu_{k-1}``,
    so two forward evaluations per step determine it.
    """
    if side not in (PLUS, MINUS):
        raise ValueError("side must be 'plus' or 'minus'")
    if gamma.direction != INFINITY:
        raise ValidationError("branch series must be expanded at infinity")
    d = degree
    last = Fraction(-1) - Fraction(d - 1, d)
    if d > 1 and not gamma.u_order < last:
        raise MissingOrders(f"need the u^{last} coefficient; series is known above u^{gamma.u_order}")
    sign = 1 if side == MINUS else -1
    with working_precision(precision):
        targets = [sign * to_mpf(gamma.coeff_u(-1 - Fraction(k, d))) for k in range(1, d)]
        z: List = []
        for k in range(1, d):
            b0 = _forward_b(z + [mpf(0)], d, precision)[k - 1]
            b1 = _forward_b(z + [mpf(1)], d, precision)[k - 1]
            slope = to_mpf(b1) - to_mpf(b0)
            z.append((targets[k - 1] - to_mpf(b0)) / slope)
    return NormalizedHalfShape(side, d, tuple(z))


def _bracketed_root(fn, lo, hi, precision: int):
    """Root of a function with a sign change on ``[lo, hi]``."""
    flo, fhi = fn(lo), fn(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise NoSolution("scale equations have no bracketed root")
    try:
        x = mpmath.findroot(fn, (lo, hi), solver="illinois", tol=mpf(2) ** (-2 * precision), maxsteps=400)
        if lo <= x <= hi and abs(fn(x)) <= mpf(2) ** (8 - precision) * (abs(flo) + abs(fhi)):
            return x
    except (ValueError, ZeroDivisionError):
        pass
    for _ in range(precision + 64):
        mid = (lo + hi) / 2
        fm = fn(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return (lo + hi) / 2


def _poly_eval(coeffs: Sequence, x):
    """``sum coeffs[i] x**(d-i)`` for ``i < d`` (no constant term)."""
    d = len(coeffs)
    return mpmath.fsum(to_mpf(c) * x ** (d - i) for i, c in enumerate(coeffs))


def _poly_log_derivative(coeffs: Sequence, x):
    d = len(coeffs)
    return mpmath.fsum((d - i) * to_mpf(c) * x ** (d - i) for i, c in enumerate(coeffs))


def _upper_scale(coeffs, budget):
    hi = mpf(1)
    while _poly_eval(coeffs, hi) < budget:
        hi *= 2
    return hi


def project_to_affine(kappas: Dict[int, Fraction], e: int, f: int) -> Dict[int, Fraction]:
    """Adjust ``kappa_{-e}`` and ``kappa_f`` so mass is 1 and mean 0 exactly."""
    rest = {k: c for k, c in kappas.items() if k not in (-e, f)}
    M = 1 - sum(rest.values(), Fraction(0))
    D = -sum((k * c for k, c in rest.items()), Fraction(0))
    out = dict(rest)
    out[f] = (D + e * M) / (e + f)
    out[-e] = M - out[f]
    return out


def _rationalize(values: Dict[int, mpf], e: int, f: int, precision: int) -> WalkShape:
    snap = mpf(2) ** (16 - precision)
    exact = {k: (Fraction(0) if abs(v) < snap else to_fraction(v)) for k, v in values.items()}
    exact = project_to_affine(exact, e, f)
    return new_shape(exact)


def _bracketed_scales(pc, mc, k0: Fraction, precision: int):
    """Scales ``(a, b)`` by nested bracketing: ``b`` from the mass equation, ``a`` from the mean."""
    with working_precision(precision):
        budget = 1 - to_mpf(k0)
        a_max = _bracketed_root(lambda a: _poly_eval(pc, a) - budget, mpf(0),
                                _upper_scale(pc, budget), precision)
        b_hi = _upper_scale(mc, budget)

        def b_of(a):
            rem = budget - _poly_eval(pc, a)
            if rem <= 0:
                return mpf(0)
            return _bracketed_root(lambda b: _poly_eval(mc, b) - rem, mpf(0), b_hi, precision)

        def mean(a):
            return _poly_log_derivative(pc, a) - _poly_log_derivative(mc, b_of(a))

        a = _bracketed_root(mean, mpf(0), a_max, precision)
        return a, b_of(a)


def _newton_scales(pc, mc, k0: Fraction, a, b, precision: int, max_steps: int = 60):
    """Newton on mass and mean together; ``None`` if it does not settle."""
    budget = 1 - to_mpf(k0)
    tol = mpf(2) ** (8 - precision)

    def second(coeffs, x):
        d = len(coeffs)
        return mpmath.fsum((d - i) ** 2 * to_mpf(c) * x ** (d - i - 1) for i, c in enumerate(coeffs))

    a, b = to_mpf(a), to_mpf(b)
    for _ in range(max_steps):
        F1 = _poly_eval(pc, a) + _poly_eval(mc, b) - budget
        F2 = _poly_log_derivative(pc, a) - _poly_log_derivative(mc, b)
        if abs(F1) <= tol and abs(F2) <= tol:
            return a, b
        j11, j12 = _poly_log_derivative(pc, a) / a, _poly_log_derivative(mc, b) / b
        j21, j22 = second(pc, a), -second(mc, b)
        det = j11 * j22 - j12 * j21
        if det == 0:
            return None
        da = (F1 * j22 - j12 * F2) / det
        db = (j11 * F2 - j21 * F1) / det
        a, b = a - da, b - db
        if a <= 0 or b <= 0:
            return None
    return None


def fix_scales(plus: NormalizedHalfShape, minus: NormalizedHalfShape, kappa0,
               precision: int = DEFAULT_PRECISION) -> WalkShape:
    """The unique shape with the given half-shape classes and ``kappa_0``.

    With monic representatives ``psi_+`` and ``psi_-`` the scales ``a, b``
    solve ``psi_+(a) + kappa_0 + psi_-(b) = 1`` and
    ``a psi_+'(a) = b psi_-'(b)``.  For each ``a`` the mass equation gives
    ``b``; the mean equation is then increasing in ``a``.  The result is
    rounded to dyadic rationals and projected back onto mass 1, mean 0.
    """
    k0 = Fraction(kappa0)
    if not 0 <= k0 < 1:
        raise NoSolution(f"kappa_0 = {k0} leaves no mass for the two sides")
    pc, mc = plus.monic(), minus.monic()
    f, e = plus.degree, minus.degree
    # bracket at low precision, then polish both scales together with Newton
    a, b = _bracketed_scales(pc, mc, k0, 64)
    with working_precision(precision + 16):
        polished = _newton_scales(pc, mc, k0, a, b, precision + 16)
        if polished is None:
            polished = _bracketed_scales(pc, mc, k0, precision + 16)
        a, b = polished
        values: Dict[int, mpf] = {0: to_mpf(k0)}
        for i, c in enumerate(pc):
            values[f - i] = to_mpf(c) * a ** (f - i)
        for i, c in enumerate(mc):
            values[-(e - i)] = to_mpf(c) * b ** (e - i)
        if any(v < -mpf(2) ** (16 - precision) for v in values.values()):
            raise NoSolution("the half-shape classes do not give nonnegative coefficients")
        return _rationalize(values, e, f, precision)


def reconstruct_from_branches(pair: BranchPair, kappa0, precision: int = DEFAULT_PRECISION) -> WalkShape:
    """Shape from its two branch series and ``kappa_0 = I_1``."""
    e, f = pair.e, pair.f
    plus = half_shape_from_series(pair.gamma_plus, PLUS, f, precision)
    minus = half_shape_from_series(pair.gamma_minus, MINUS, e, precision)
    return fix_scales(plus, minus, kappa0, precision)


def reconstruct_from_diff(diff: PuiseuxSeries, e: int, f: int, kappa0,
                          precision: int = DEFAULT_PRECISION) -> WalkShape:
    """Shape from ``gamma_plus - gamma_minus`` at infinity.

    Coefficients at ``u**(-1-k/f)`` belong to the plus branch and those at
    ``u**(-1-j/e)`` to the minus branch.  When ``gcd(e, f) > 1`` the two
    lattices share non-integer exponents and the split is refused.
    """
    if e < 1 or f < 1:
        raise ValidationError("e and f must be positive")
    if e == f and e > 1:
        raise DegreesEqual(f"e = f = {e}: the branch lattices coincide")
    g = math.gcd(e, f)
    if g > 1:
        raise AmbiguousLattice(f"gcd(e, f) = {g}: exponents -1-k/{g} mix both branches")
    if diff.direction != INFINITY:
        raise ValidationError("difference series must be expanded at infinity")
    lead = diff.coeff_u(-1)
    expected = Fraction(1, e) + Fraction(1, f)
    with working_precision(precision):
        if abs(to_mpf(lead) - to_mpf(expected)) > mpf(2) ** (16 - precision):
            raise Inconsistent(f"u^-1 coefficient {format_number(lead, 12)} is not 1/e + 1/f = {expected}")

    def branch(d: int, sign: int) -> PuiseuxSeries:
        last = -1 - Fraction(d - 1, d)
        if d > 1 and not diff.u_order < last:
            raise MissingOrders(f"need the u^{last} coefficient of the difference")
        with diff._ctx():
            coeffs = [Fraction(sign, d)] + [mul(sign, diff.coeff_u(-1 - Fraction(k, d))) for k in range(1, d)]
        return make_series(coeffs, 1, d, Fraction(2), INFINITY, diff.precision)

    pair = BranchPair(branch(f, 1), branch(e, -1))
    return reconstruct_from_branches(pair, kappa0, precision)


# -- single negative step ---------------------------------------------------------

def _constant_term_power(p: Sequence[Fraction], k: int) -> Fraction:
    """Constant term of ``(t**-1 + p_0 + p_1 t + ...)**k``."""
    # positions run from -k upward; keep a dense list offset by k
    vec = {0: Fraction(1)}
    steps = [(-1, Fraction(1))] + [(j, c) for j, c in enumerate(p) if c]
    for i in range(k):
        new: Dict[int, Fraction] = {}
        left = k - i - 1
        for pos, c in vec.items():
            for j, w in steps:
                q = pos + j
                if q > left:
                    continue
                new[q] = new.get(q, Fraction(0)) + c * w
        vec = new
    return vec.get(0, Fraction(0))


RATIONAL_ROOT_BITS = 64


def reconstruct_e1(spectrum: Spectrum, f: int, precision: int = DEFAULT_PRECISION) -> WalkShape:
    """Unbiased shape with support in ``[-1, f]`` from ``I_1 .. I_{f+1}``.

    Rescaling ``t -> kappa_{-1} t`` leaves every ``I_n`` unchanged and turns
    the shape into ``t**-1 + p_0 + sum p_j t**j`` with
    ``p_j = kappa_j kappa_{-1}**j``.  ``I_k`` is ``k p_{k-1}`` plus terms in
    ``p_0..p_{k-2}``, which gives the ``p_j`` one at a time.  The mean
    condition ``x = sum j p_j x**-j`` then fixes ``x = kappa_{-1}``; it has
    a single positive root, found exactly when rational.  Any further
    values in ``spectrum`` are checked against the result.
    """
    if f < 1:
        raise ValidationError("f must be at least 1")
    if len(spectrum) < f + 1:
        raise InsufficientData(f"need I_1..I_{f + 1}, got {len(spectrum)} values")
    p: List[Fraction] = [spectrum[1]]
    for k in range(2, f + 2):
        rest = _constant_term_power(p, k)
        p.append((spectrum[k] - rest) / k)
    if any(c < 0 for c in p):
        raise NotE1(f"triangular solve gives negative products {[str(c) for c in p]}")
    if all(c == 0 for c in p[1:]):
        raise NotE1("no positive steps are consistent with this spectrum")
    # -x**(f+1) + sum_j j p_j x**(f-j) = 0, constant term first
    poly = [Fraction(0)] * (f + 2)
    poly[f + 1] = Fraction(-1)
    for j in range(1, f + 1):
        poly[f - j] += j * p[j]
    (lo, hi), = _roots.isolate_real_roots(poly, Fraction(0), _roots.cauchy_bound(poly))
    # limit_denominator needs the root to about twice the denominator's bits
    lo, hi = _roots.refine_root(poly, lo, hi, 2 * RATIONAL_ROOT_BITS + 8)
    x = _roots.recognize_rational_root(poly, (lo + hi) / 2, RATIONAL_ROOT_BITS)
    if x is not None:
        kappas = {-1: x, 0: p[0]}
        kappas.update({j: p[j] / x ** j for j in range(1, f + 1)})
        mass = sum(kappas.values(), Fraction(0))
        if mass != 1:
            raise Inconsistent(f"recovered coefficients sum to {mass}")
        shape = new_shape(kappas)
    else:
        lo, hi = _roots.refine_root(poly, lo, hi, precision + 16)
        with working_precision(precision + 16):
            xm = to_mpf((lo + hi) / 2)
            vals = {-1: xm, 0: to_mpf(p[0])}
            vals.update({j: to_mpf(p[j]) / xm ** j for j in range(1, f + 1)})
            mass = mpmath.fsum(vals.values())
            if abs(mass - 1) > mpf(2) ** (16 - precision):
                raise Inconsistent(f"recovered coefficients sum to {mpmath.nstr(mass, 20)}")
            top = max(j for j in range(1, f + 1) if p[j])
            shape = _rationalize(vals, 1, top, precision)
    if len(spectrum) > f + 1:
        check = return_probabilities(shape, len(spectrum))
        for n in range(f + 2, len(spectrum) + 1):
            if x is not None and check[n] != spectrum[n]:
                raise Inconsistent(f"I_{n} does not match the recovered shape")
            if x is None and abs(to_mpf(check[n] - spectrum[n])) > mpf(2) ** (32 - precision):
                raise Inconsistent(f"I_{n} does not match the recovered shape")
    return shape


# -- which uniqueness statement applies ---------------------------------------------

CLEAN, MAIN, GENERIC, EXCEPTIONAL = "TheoremClean", "TheoremMain", "GenericOnly", "Exceptional"


@dataclass(frozen=True)
class GuaranteeReport:
    n: int
    e: int
    f: int
    verdict: str
    table_rows: Tuple = ()
    notes: Tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "schema": "walkspec.guarantee/1",
            "n": self.n, "e": self.e, "f": self.f,
            "verdict": self.verdict,
            "table_rows": [dict(row.to_json(), parameters=_json_params(params))
                           for row, params in self.table_rows],
            "notes": list(self.notes),
        }


def _json_params(params: Dict) -> Dict:
    return {k: v for k, v in params.items()}


def is_square(n: int) -> bool:
    return math.isqrt(n) ** 2 == n


def guarantee(e: int, f: int) -> GuaranteeReport:
    """Classify degrees ``(e, f)``.

    ``TheoremClean`` when ``gcd(e, f) = 1``; otherwise ``Exceptional`` when
    ``n = e + f`` is 10 or a perfect square, with every table row whose
    degree can be ``n`` attached; otherwise ``TheoremMain``.
    """
    if e < 1 or f < 1:
        raise ValidationError("e and f must be positive")
    n = e + f
    g = math.gcd(e, f)
    exceptional_n = n == 10 or is_square(n)
    notes = []
    if g == 1:
        verdict = CLEAN
        notes.append("coprime degrees: spectrum determines the walk up to reflection")
        if not exceptional_n:
            notes.append(f"n = {n} is neither 10 nor a square, so the general statement applies as well")
    elif exceptional_n:
        verdict = EXCEPTIONAL
        notes.append(f"n = {n} is {'10' if n == 10 else 'a perfect square'}; uniqueness is open here")
    else:
        verdict = MAIN
        notes.append(f"n = {n} is neither 10 nor a square: primitive unbiased walks are determined up to reflection")
    rows = tuple(rows_for_n(n)) if verdict == EXCEPTIONAL else ()
    if rows:
        small = min(e, f)
        compatible = [r.group for r, params in rows if _e_compatible(r, params, small, n)]
        if compatible:
            notes.append(f"rows compatible with e = {small}: " + "; ".join(compatible))
    return GuaranteeReport(n, e, f, verdict, rows, tuple(notes))


def _e_compatible(row: MullerTableRow, params: Dict, e: int, n: int) -> bool:
    opts = row.e_options
    if opts == "p":
        return e == params.get("p")
    if opts == "p+1":
        return e == params.get("p", -2) + 1
    if opts.startswith("ar"):
        return e % params["r"] == 0 and e // params["r"] in params["a"]
    if opts.startswith("1,...,"):
        return 1 <= e <= n // 2
    if opts.startswith("(q^m-1)"):
        return 2 * e == n
    return e in {int(t) for t in re.findall(r"\d+", opts)}


def guarantee_for_shape(shape: WalkShape) -> GuaranteeReport:
    """Like :func:`guarantee`, but a support with gcd > 1 only gets ``GenericOnly``.

    Such a shape is ``chi(t**d)`` for a smaller shape, hence not primitive.
    """
    g = support_gcd(shape)
    if g > 1:
        e, f = shape.e, shape.f
        return GuaranteeReport(e + f, e, f, GENERIC, (),
                               (f"support gcd {g}: the walk is a reindexed copy and not primitive",))
    return guarantee(shape.e, shape.f)
