"""Laplace-method expansions of the return-probability generating functions.

``L(s) = exp(-s) sum_n I_n s**n / n!`` is the constant term of
``exp(s (chi(t) - 1))`` and behaves like
``(2 pi J_2 s)**(-1/2) sum_l A_l s**(-l)``.  Its real-exponential
counterpart ``Lt(s) = (2 pi)**-1 int exp(-s (chi(e**x) - 1)) dx`` has the
same expansion with ``A_l`` replaced by ``(-1)**l A_l``.

The ``A_l`` are polynomials in the normalized moments
``rho_n = J_n / J_2**(n/2)``; :func:`symbolic_A` produces them exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath
from mpmath import mp, mpf

from ._numeric import DEFAULT_PRECISION, format_number, is_exact, to_mpf, working_precision
from .errors import Biased, OrderTooLarge, QuadratureFailure, TailNotConverged
from .spectrum import return_probabilities
from .walk_core import WalkShape, moments

MAX_ORDER = 12
PLAIN, ALTERNATING = "plain", "alternating"

Monomial = Tuple[Tuple[int, int], ...]  # ((n, power), ...) sorted by n


@dataclass(frozen=True)
class NormalizedMomentPolynomial:
    """Polynomial in ``rho_3, rho_4, ...`` with rational coefficients."""

    terms: Tuple[Tuple[Monomial, Fraction], ...]

    @classmethod
    def from_dict(cls, d: Dict[Monomial, Fraction]) -> "NormalizedMomentPolynomial":
        return cls(tuple(sorted((k, v) for k, v in d.items() if v != 0)))

    def as_dict(self) -> Dict[Monomial, Fraction]:
        return dict(self.terms)

    @staticmethod
    def weight_of(mono: Monomial) -> int:
        return sum((n - 2) * p for n, p in mono)

    def weights(self) -> set:
        return {self.weight_of(m) for m, _ in self.terms}

    def variables(self) -> set:
        return {n for m, _ in self.terms for n, _ in m}

    def evaluate(self, rho: Dict[int, object]):
        """Value at ``rho[n]`` (missing entries count as 0)."""
        total = Fraction(0)
        for mono, c in self.terms:
            val = c
            for n, p in mono:
                r = rho.get(n, 0)
                val = val * (r ** p) if (is_exact(val) and is_exact(r)) else to_mpf(val) * to_mpf(r) ** p
            total = total + val if (is_exact(total) and is_exact(val)) else to_mpf(total) + to_mpf(val)
        return total

    def evaluate_moments(self, J) -> Fraction:
        """Exact value from raw moments ``J[n]``.

        Every monomial of weight ``2l`` picks up an integral power of ``J_2``,
        so the result is rational whenever the moments are.
        """
        total = Fraction(0)
        for mono, c in self.terms:
            num = Fraction(c)
            half = 0
            for n, p in mono:
                num *= Fraction(J[n]) ** p
                half += n * p
            total += num / Fraction(J[2]) ** (half // 2)
        return total

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        out = ""
        for mono, c in self.terms:
            vars_ = "*".join(f"rho{n}" + (f"^{p}" if p > 1 else "") for n, p in mono)
            body = f"{abs(c)}" + (f"*{vars_}" if vars_ else "")
            if not out:
                out = ("-" if c < 0 else "") + body
            else:
                out += (" - " if c < 0 else " + ") + body
        return out


def _double_factorial_odd(j: int) -> int:
    """``(j-1)!!`` for even ``j``: the Gaussian moment ``E[w**j]``."""
    out = 1
    for k in range(j - 1, 0, -2):
        out *= k
    return out


def symbolic_A(m: int, sign_mode: str = PLAIN) -> List[NormalizedMomentPolynomial]:
    """``[A_0, ..., A_m]`` as exact polynomials in the normalized moments.

    The integrand after rescaling is ``exp(-w**2/2) exp(T)`` with
    ``T = sum_{n>=3} rho_n (i w)**n z**(n-2) / n!`` and ``z = s**-1/2``.
    ``exp(T)`` is expanded to ``z**(2m)``, and each ``w**j`` with ``j`` even
    integrates to ``(j-1)!!`` against the normalized Gaussian.  In
    ``alternating`` mode ``T`` is ``-sum rho_n w**n z**(n-2) / n!`` instead.
    """
    if m < 0:
        raise ValueError("m must be nonnegative")
    if m > MAX_ORDER:
        raise OrderTooLarge(f"m = {m} exceeds {MAX_ORDER}")
    if sign_mode not in (PLAIN, ALTERNATING):
        raise ValueError(f"unknown sign mode {sign_mode!r}")
    zmax = 2 * m
    # series terms keyed by (power of w, power of z, monomial in rho); the
    # power of i equals the power of w in plain mode
    T: Dict[Tuple[int, int, Monomial], Fraction] = {}
    for n in range(3, zmax + 3):
        coef = Fraction(1, math.factorial(n))
        if sign_mode == ALTERNATING:
            coef = -coef
        T[(n, n - 2, ((n, 1),))] = coef

    def multiply(a, b):
        out: Dict = {}
        for (ja, ka, ma), ca in a.items():
            for (jb, kb, mb), cb in b.items():
                k = ka + kb
                if k > zmax:
                    continue
                key = (ja + jb, k, _merge(ma, mb))
                out[key] = out.get(key, Fraction(0)) + ca * cb
        return out

    expT: Dict = {(0, 0, ()): Fraction(1)}
    power = {(0, 0, ()): Fraction(1)}
    for r in range(1, zmax + 1):
        power = multiply(power, T)
        if not power:
            break
        for key, c in power.items():
            expT[key] = expT.get(key, Fraction(0)) + c / math.factorial(r)

    result: List[Dict[Monomial, Fraction]] = [dict() for _ in range(m + 1)]
    for (j, k, mono), c in expT.items():
        if j % 2 or k % 2:
            continue
        sign = (-1) ** (j // 2) if sign_mode == PLAIN else 1
        val = c * sign * _double_factorial_odd(j)
        d = result[k // 2]
        d[mono] = d.get(mono, Fraction(0)) + val
    return [NormalizedMomentPolynomial.from_dict(d) for d in result]


def _merge(a: Monomial, b: Monomial) -> Monomial:
    d = dict(a)
    for n, p in b:
        d[n] = d.get(n, 0) + p
    return tuple(sorted(d.items()))


def prefactor(shape: WalkShape, precision: int = DEFAULT_PRECISION) -> mpf:
    """``(2 pi J_2)**(-1/2)``."""
    with working_precision(precision):
        return 1 / mpmath.sqrt(2 * mp.pi * to_mpf(moments(shape, 2)[2]))


def alternative_prefactor(shape: WalkShape, precision: int = DEFAULT_PRECISION) -> mpf:
    """``sqrt(J_2 / (2 pi))``; differs from :func:`prefactor` unless ``J_2 = 1``."""
    with working_precision(precision):
        return mpmath.sqrt(to_mpf(moments(shape, 2)[2]) / (2 * mp.pi))


@dataclass(frozen=True)
class AsymptoticExpansion:
    prefactor: object
    coefficients: Tuple
    sign_mode: str = PLAIN

    def partial_sum(self, s, terms: Optional[int] = None):
        """``prefactor * s**-1/2 * sum_{l<terms} A_l s**-l``."""
        s = to_mpf(s)
        coeffs = self.coefficients[: terms if terms is not None else len(self.coefficients)]
        return to_mpf(self.prefactor) * mpmath.fsum(to_mpf(a) * s ** (-l) for l, a in enumerate(coeffs)) / mpmath.sqrt(s)

    def to_json(self) -> dict:
        return {
            "schema": "walkspec.expansion/1",
            "prefactor": format_number(self.prefactor, 30),
            "coefficients": [format_number(a) for a in self.coefficients],
            "sign_mode": self.sign_mode,
        }


def expansion(shape: WalkShape, m: int, sign_mode: str = PLAIN,
              precision: int = DEFAULT_PRECISION) -> AsymptoticExpansion:
    """Numeric expansion for ``shape``: exact ``A_l`` and the resolved prefactor."""
    polys = symbolic_A(m, sign_mode)
    J = moments(shape, 2 * m + 2)
    coeffs = tuple(p.evaluate_moments(J) for p in polys)
    return AsymptoticExpansion(prefactor(shape, precision), coeffs, sign_mode)


# -- numerical values of L and Lt ----------------------------------------------

def _poisson_tail(s, N: int):
    """Upper bound for ``exp(-s) sum_{n>N} s**n / n!`` (needs ``s < N + 2``)."""
    s = to_mpf(s)
    if s >= N + 2:
        return mpmath.inf
    return mpmath.exp(-s) * s ** (N + 1) / mpmath.factorial(N + 1) / (1 - s / (N + 2))


def evaluate_L(shape: WalkShape, s, n_terms: Optional[int] = None,
               precision: int = DEFAULT_PRECISION):
    """``L(s)`` with truncation error below ``2**-precision``.

    With ``n_terms`` the defining series is summed through ``I_{n_terms}``
    (exactly, when ``s`` is rational) and the Poisson tail bound decides
    whether that is enough.  Without it the constant term of
    ``exp(s (chi - 1))`` is taken as ``sum_m P_m N_m`` where ``P_m`` and
    ``N_m`` are the coefficients of ``exp(s chi_+(t))`` and
    ``exp(s chi_-(1/t))``; all terms are positive, and the cut-off comes
    from a Cauchy bound on a circle of radius ``R``.
    """
    with working_precision(precision):
        if to_mpf(s) < 0:
            raise ValueError("s must be nonnegative")
        if s == 0:
            return mpf(1)
        if n_terms is not None:
            return _L_from_spectrum(shape, s, n_terms, precision)
        return _L_from_exponentials(shape, s, precision)


def _L_from_spectrum(shape, s, N, precision):
    tail = _poisson_tail(s, N)
    if not tail < mpf(2) ** (-precision):
        raise TailNotConverged(f"{N} terms leave a tail bound of {mpmath.nstr(tail, 5)}")
    spec = return_probabilities(shape, N)
    if is_exact(s):
        s = Fraction(s)
        acc = Fraction(1)
        term = Fraction(1)
        for n in range(1, N + 1):
            term = term * s / n
            acc += term * spec[n]
        return to_mpf(acc) * mpmath.exp(-to_mpf(s))
    s = to_mpf(s)
    term = mpf(1)
    acc = mpf(1)
    for n in range(1, N + 1):
        term = term * s / n
        acc += term * to_mpf(spec[n])
    return acc * mpmath.exp(-s)


def _side_coefficients(weights: Dict[int, object], s, M: int) -> List[mpf]:
    """Coefficients of ``exp(s * sum_k w_k t**k)`` through ``t**M``."""
    P = [mpf(1)]
    items = [(k, to_mpf(w) * s * k) for k, w in weights.items()]
    for m in range(1, M + 1):
        acc = mpf(0)
        for k, sk in items:
            if k <= m:
                acc += sk * P[m - k]
        P.append(acc / m)
    return P


def _cutoff(shape: WalkShape, s: float, bits: int) -> int:
    """Smallest ``M`` such that ``sum_{m>M} P_m N_m`` is below ``2**-bits`` relative
    to ``exp(s (1 - kappa_0))``, minimized over a grid of radii."""
    plus = {k: float(c) for k, c in shape.items if k > 0}
    minus = {-k: float(c) for k, c in shape.items if k < 0}
    k0 = float(shape[0])
    best = None
    target = bits * math.log(2)
    for i in range(1, 400):
        R = 1 + i * i * 1e-4
        E = sum(c * R ** k for k, c in plus.items()) + sum(c * R ** k for k, c in minus.items()) + k0 - 1
        logR2 = 2 * math.log(R)
        extra = -math.log1p(-1 / R ** 2)
        M = math.ceil((s * E + extra + target) / logR2)
        if best is None or M < best:
            best = M
    return best


def _L_from_exponentials(shape: WalkShape, s, precision: int):
    s = to_mpf(s)
    M = _cutoff(shape, float(s), precision + 16)
    P = _side_coefficients({k: c for k, c in shape.items if k > 0}, s, M)
    N = _side_coefficients({-k: c for k, c in shape.items if k < 0}, s, M)
    total = mpmath.fsum(p * n for p, n in zip(P, N))
    return total * mpmath.exp(s * (to_mpf(shape[0]) - 1))


def _tail_width(phi, s, sign: int, start: mpf, bits: int) -> mpf:
    """``X`` with ``int_X^oo exp(-s phi(sign*x)) dx < 2**-bits``.

    ``phi`` is convex with ``phi(0) = phi'(0) = 0``, so beyond ``X`` it stays
    above the chord ``phi(X) x / X`` and the tail is at most
    ``X exp(-s phi(X)) / (s phi(X))``.
    """
    X = start
    bound = mpf(2) ** (-bits)
    for _ in range(200):
        p = phi(sign * X)
        if p > 0 and X * mpmath.exp(-s * p) / (s * p) < bound:
            return X
        X *= 2
    raise QuadratureFailure("could not bound the integrand tail")


def evaluate_L_tilde(shape: WalkShape, s, precision: int = DEFAULT_PRECISION):
    """``(2 pi)**-1 int_R exp(-s (chi(e**x) - 1)) dx`` by tanh-sinh quadrature.

    The interval is cut where the convexity tail bound drops below
    ``2**-precision`` and split at multiples of the natural width
    ``(J_2 s)**-1/2`` so every panel sees a smooth, unpeaked integrand.
    """
    if not shape.unbiased:
        raise Biased("the real-exponential integral needs an unbiased shape")
    with working_precision(precision):
        s = to_mpf(s)
        if s <= 0:
            raise ValueError("s must be positive")
        coeffs = [(k, to_mpf(c)) for k, c in shape.items]

        def phi(x):
            return mpmath.fsum(c * mpmath.expm1(k * x) for k, c in coeffs if k)

        def integrand(x):
            return mpmath.exp(-s * phi(x))

        J2 = to_mpf(moments(shape, 2)[2])
        width = 1 / mpmath.sqrt(J2 * s)
        bits = precision + 8
        right = _tail_width(phi, s, 1, width, bits)
        left = _tail_width(phi, s, -1, width, bits)
        points = [mpf(0)]
        x = width
        while x < right:
            points.append(x)
            x *= 2
        points.append(right)
        x = width
        while x < left:
            points.insert(0, -x)
            x *= 2
        points.insert(0, -left)
        value, err = mpmath.quad(integrand, points, error=True, maxdegree=10)
        if not err <= abs(value) * mpf(2) ** (16 - precision):
            raise QuadratureFailure(f"quadrature error estimate {mpmath.nstr(err, 5)} too large")
        return value / (2 * mp.pi)


# -- fitting and the empirical little-o check ------------------------------------

@dataclass(frozen=True)
class CoefficientFit:
    values: Tuple
    errors: Tuple


def _solve(rows, rhs):
    A = mpmath.matrix(rows)
    b = mpmath.matrix(rhs)
    if A.rows == A.cols:
        return list(mpmath.lu_solve(A, b))
    return list(mpmath.qr_solve(A, b)[0])


def fit_series(s_values: Sequence, y_values: Sequence, K: int) -> List[mpf]:
    """Least-squares ``y = sum_{l<K} beta_l s**-l`` (interpolation when ``K`` equals the point count)."""
    rows = [[to_mpf(s) ** (-l) for l in range(K)] for s in s_values]
    return _solve(rows, [to_mpf(y) for y in y_values])


def fit_coefficients(s_values: Sequence, L_values: Sequence, prefactor_value,
                     count: Optional[int] = None) -> CoefficientFit:
    """Fit ``A_1, A_2, ...`` in ``L sqrt(s) / prefactor = 1 + sum_l A_l s**-l``.

    Uses as many unknowns as grid points.  The error bar of each
    coefficient is its change when the smallest ``s`` is dropped and one
    fewer unknown is fitted.  ``values[l]`` is ``A_l``; ``A_0 = 1`` is
    fixed by the prefactor and listed with error 0.
    """
    s_values = [to_mpf(s) for s in s_values]
    y = [(to_mpf(v) * mpmath.sqrt(s) / to_mpf(prefactor_value) - 1) * s for v, s in zip(L_values, s_values)]
    K = count or len(s_values)
    full = fit_series(s_values, y, K)
    if K > 1 and len(s_values) > 1:
        reduced = fit_series(s_values[1:], y[1:], K - 1) + [mpf(0)]
        err = [abs(a - b) for a, b in zip(full, reduced)]
    else:
        err = [mpmath.inf] * K
    return CoefficientFit((mpf(1),) + tuple(full), (mpf(0),) + tuple(err))


@dataclass(frozen=True)
class VerificationReport:
    shape: WalkShape
    m: int
    s_grid: Tuple
    values: Tuple
    residuals: Tuple
    passed: bool
    fitted_prefactor: object
    prefactor_candidates: Dict[str, object]
    prefactor_deviation: Dict[str, object]
    selected_prefactor: str
    fitted_A: CoefficientFit
    symbolic_A: Tuple
    notes: List[str] = field(default_factory=list)

    def to_json(self) -> dict:
        d = 20
        return {
            "schema": "walkspec.verify/1",
            "shape": self.shape.to_json()["coeffs"],
            "m": self.m,
            "s_grid": [format_number(s, d) for s in self.s_grid],
            "L": [format_number(v, d) for v in self.values],
            "residuals": [format_number(r, d) for r in self.residuals],
            "pass": self.passed,
            "verdict": "PASS" if self.passed else "FAIL",
            "fitted_prefactor": format_number(self.fitted_prefactor, d),
            "prefactor_candidates": {k: format_number(v, d) for k, v in self.prefactor_candidates.items()},
            "prefactor_relative_deviation": {k: format_number(v, 6) for k, v in self.prefactor_deviation.items()},
            "selected_prefactor": self.selected_prefactor,
            "fitted_A": [format_number(a, d) for a in self.fitted_A.values],
            "fitted_A_error": [format_number(a, 6) for a in self.fitted_A.errors],
            "symbolic_A": [format_number(a, d) for a in self.symbolic_A],
            "notes": self.notes,
        }


def verify_expansion(shape: WalkShape, m: int, s_grid: Sequence,
                     precision: int = DEFAULT_PRECISION, tilde: bool = False,
                     threads: int = 1) -> VerificationReport:
    """Numerical check of the expansion of ``L`` (or ``Lt`` when ``tilde``).

    Residuals are ``(value - partial expansion through A_m) s**(m+1/2)``;
    the check passes when their absolute values decrease along the grid.
    The prefactor is fitted freely first and compared with both candidate
    closed forms; the ``A_l`` are then fitted with the closer one fixed.
    """
    grid = list(s_grid)
    if len(grid) < 3:
        raise ValueError("s_grid needs at least 3 points")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("s_grid must be increasing")
    if tilde and not shape.unbiased:
        raise Biased("the real-exponential integral needs an unbiased shape")
    mode = ALTERNATING if tilde else PLAIN
    with working_precision(precision):
        func = evaluate_L_tilde if tilde else evaluate_L
        if threads > 1:
            from concurrent.futures import ThreadPoolExecutor
            with ThreadPoolExecutor(max_workers=threads) as pool:
                values = list(pool.map(lambda s: func(shape, s, precision=precision), grid))
        else:
            values = [func(shape, s, precision=precision) for s in grid]
        s_mp = [to_mpf(s) for s in grid]
        exp_ = expansion(shape, m, mode, precision)
        residuals = tuple((v - exp_.partial_sum(s)) * s ** (m + mpf(1) / 2) for v, s in zip(values, s_mp))
        mags = [abs(r) for r in residuals]
        passed = all(b < a for a, b in zip(mags, mags[1:]))

        free = fit_series(s_mp, [v * mpmath.sqrt(s) for v, s in zip(values, s_mp)], len(grid))
        fitted = free[0]
        cands = {"(2 pi J_2)^(-1/2)": prefactor(shape, precision),
                 "sqrt(J_2 / (2 pi))": alternative_prefactor(shape, precision)}
        dev = {k: abs(fitted / v - 1) for k, v in cands.items()}
        selected = min(dev, key=lambda k: dev[k])
        fit = fit_coefficients(s_mp, values, cands[selected])
        notes = []
        if cands["(2 pi J_2)^(-1/2)"] == cands["sqrt(J_2 / (2 pi))"]:
            notes.append("J_2 = 1: the two prefactor candidates coincide")
    return VerificationReport(shape, m, tuple(s_mp), tuple(values), residuals, passed, fitted,
                              cands, dev, selected, fit, exp_.coefficients, notes)
