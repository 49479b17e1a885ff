"""Truncated Puiseux series and the branch expansions of a walk shape.

A :class:`PuiseuxSeries` is a finite list of coefficients on the exponent
lattice ``valuation + i/ramification`` of a local variable ``x``, together
with the first exponent that is *not* known (``order``).  At zero the local
variable is ``u`` itself; at infinity it is ``1/u``.  Coefficients are exact
Fractions where that comes for free (leading terms, rational data) and mpf
otherwise.

The branch functions follow the scaled construction: with
``c = kappa_{-e}**(1/e)`` and ``t = c*tau``, ``chi(t) = 1 + u`` becomes
``tau**-e * P(tau) = u`` for a polynomial ``P`` with ``P(0) = 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import mpmath
from mpmath import mp, mpf

from ._numeric import (
    DEFAULT_PRECISION,
    GUARD_BITS,
    add,
    digits_for,
    format_number,
    is_exact,
    mul,
    parse_number,
    rational_power,
    sub,
    to_mpf,
    working_precision,
)
from .errors import Biased, ExponentClash, NonPositiveLeading, NotType11, ValidationError
from .walk_core import WalkShape, moments, reindex

SERIES_SCHEMA = "walkspec.series/1"
ZERO, INFINITY = "zero", "infinity"
INF = math.inf
# relative terms produced when an operation on an exact polynomial has no natural end
DEFAULT_TERMS = 24


def _count(valuation: Fraction, order, m: int) -> Optional[int]:
    if order == INF:
        return None
    return max(0, math.ceil((order - valuation) * m))


def _is_zero(c) -> bool:
    return c == 0


def _neg(c):
    # mpf negation would round to the ambient precision
    return mpmath.fneg(c, exact=True) if isinstance(c, mpf) else -c


@dataclass(frozen=True)
class PuiseuxSeries:
    """``sum_i coeffs[i] * x**(valuation + i/ramification) + O(x**order)``.

    Build instances with :func:`make_series`, which normalizes leading zeros.
    ``order`` is ``math.inf`` for an exact (polynomial) series.
    """

    ramification: int
    valuation: Fraction
    coeffs: Tuple
    order: object
    direction: str = ZERO
    precision: int = DEFAULT_PRECISION

    # -- inspection -------------------------------------------------------
    @property
    def leading(self):
        if not self.coeffs:
            raise ValueError("zero series has no leading coefficient")
        return self.coeffs[0]

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def exponents(self) -> List[Fraction]:
        return [self.valuation + Fraction(i, self.ramification) for i in range(len(self.coeffs))]

    def terms(self):
        return list(zip(self.exponents(), self.coeffs))

    def coeff(self, a) -> object:
        """Coefficient of ``x**a`` in the local variable."""
        a = Fraction(a)
        if a >= self.order:
            raise ValueError(f"exponent {a} is beyond the truncation order {self.order}")
        idx = (a - self.valuation) * self.ramification
        if idx < 0 or idx.denominator != 1 or idx >= len(self.coeffs):
            return Fraction(0)
        return self.coeffs[int(idx)]

    def coeff_u(self, q) -> object:
        """Coefficient of ``u**q`` whatever the direction."""
        q = Fraction(q)
        return self.coeff(q if self.direction == ZERO else -q)

    @property
    def u_order(self):
        """First unknown exponent in ``u`` (an upper bound at infinity)."""
        if self.order == INF:
            return -INF if self.direction == INFINITY else INF
        return self.order if self.direction == ZERO else -self.order

    def _ctx(self, *others):
        bits = max([self.precision] + [o.precision for o in others])
        return mp.workprec(bits + GUARD_BITS)

    def _like(self, m, v, coeffs, order, direction=None, precision=None):
        return make_series(coeffs, v, m, order, direction or self.direction,
                           precision if precision is not None else self.precision)

    # -- lattice manipulation ---------------------------------------------
    def with_ramification(self, M: int) -> "PuiseuxSeries":
        if M % self.ramification:
            raise ValueError("new ramification must be a multiple of the old one")
        if M == self.ramification:
            return self
        step = M // self.ramification
        out = []
        for i, c in enumerate(self.coeffs):
            if i:
                out.extend([Fraction(0)] * (step - 1))
            out.append(c)
        n = _count(self.valuation, self.order, M)
        if n is not None:
            out.extend([Fraction(0)] * (n - len(out)))
        return PuiseuxSeries(M, self.valuation, tuple(out), self.order, self.direction, self.precision)

    def reduced(self) -> "PuiseuxSeries":
        """Same series on the coarsest lattice that carries every nonzero coefficient."""
        m = self.ramification
        for g in sorted((d for d in range(2, m + 1) if m % d == 0), reverse=True):
            if (self.valuation * (m // g)).denominator != 1:
                continue
            if all(i % g == 0 for i, c in enumerate(self.coeffs) if not _is_zero(c)):
                return make_series(self.coeffs[::g], self.valuation, m // g, self.order,
                                   self.direction, self.precision)
        return self

    def truncate(self, order) -> "PuiseuxSeries":
        if order >= self.order:
            return self
        return self._like(self.ramification, self.valuation, self.coeffs, order)

    def shift(self, a) -> "PuiseuxSeries":
        """Multiply by ``x**a``."""
        a = Fraction(a)
        m = math.lcm(self.ramification, a.denominator)
        s = self.with_ramification(m)
        order = s.order + a if s.order != INF else INF
        return self._like(m, s.valuation + a, s.coeffs, order)

    def scale_variable(self, k, sign: int = 1) -> "PuiseuxSeries":
        """Substitute ``x -> sign * x**k`` for a positive rational ``k``."""
        k = Fraction(k)
        if k <= 0:
            raise ValueError("k must be positive")
        coeffs = list(self.coeffs)
        if sign < 0:
            for i, a in enumerate(self.exponents()):
                if a.denominator != 1:
                    if not _is_zero(coeffs[i]):
                        raise ExponentClash("x -> -x**k needs integer exponents")
                elif a.numerator % 2:
                    coeffs[i] = _neg(coeffs[i])
        # exponent v + i/m becomes k v + i k/m; put it on the lattice 1/M
        step = k / self.ramification
        M = math.lcm(step.denominator, (k * self.valuation).denominator)
        spread = int(step * M)
        out = []
        for i, c in enumerate(coeffs):
            if i:
                out.extend([Fraction(0)] * (spread - 1))
            out.append(c)
        order = self.order * k if self.order != INF else INF
        return self._like(M, k * self.valuation, out, order)

    def scale_argument(self, c) -> "PuiseuxSeries":
        """Substitute ``x -> c*x`` for ``c > 0``."""
        with self._ctx():
            coeffs = [mul(a, rational_power(c, e)) for a, e in zip(self.coeffs, self.exponents())]
        return self._like(self.ramification, self.valuation, coeffs, self.order)

    # -- arithmetic -------------------------------------------------------
    def _common(self, other):
        if self.direction != other.direction:
            raise ValueError("series expanded at different points")
        m = math.lcm(self.ramification, other.ramification)
        return self.with_ramification(m), other.with_ramification(m), m

    def __neg__(self):
        return self._like(self.ramification, self.valuation, [_neg(c) for c in self.coeffs], self.order)

    def __add__(self, other):
        if not isinstance(other, PuiseuxSeries):
            other = constant(other, self.direction, self.precision)
        a, b, m = self._common(other)
        order = min(a.order, b.order)
        if a.is_zero:
            return b.truncate(order)._with_precision(max(a.precision, b.precision))
        if b.is_zero:
            return a.truncate(order)._with_precision(max(a.precision, b.precision))
        v = min(a.valuation, b.valuation)
        ia = int((a.valuation - v) * m)
        ib = int((b.valuation - v) * m)
        n = max(ia + len(a.coeffs), ib + len(b.coeffs))
        out = [None] * n
        with self._ctx(other):
            for i, c in enumerate(a.coeffs):
                out[ia + i] = c
            for i, c in enumerate(b.coeffs):
                j = ib + i
                out[j] = c if out[j] is None else add(out[j], c)
        out = [Fraction(0) if c is None else c for c in out]
        return make_series(out, v, m, order, self.direction, max(a.precision, b.precision))

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, PuiseuxSeries):
            other = constant(other, self.direction, self.precision)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, PuiseuxSeries):
            with self._ctx():
                coeffs = [mul(c, other) for c in self.coeffs]
            return self._like(self.ramification, self.valuation, coeffs, self.order)
        a, b, m = self._common(other)
        prec = max(a.precision, b.precision)
        if a.is_zero or b.is_zero:
            order = min(a.valuation + b.order, b.valuation + a.order)
            return make_series([], Fraction(0), m, order, self.direction, prec)
        v = a.valuation + b.valuation
        order = min(a.valuation + b.order, b.valuation + a.order)
        n = _count(v, order, m)
        if n is None:
            n = len(a.coeffs) + len(b.coeffs) - 1
        with self._ctx(other):
            out = _convolve(a.coeffs, b.coeffs, n)
        return make_series(out, v, m, order, self.direction, prec)

    __rmul__ = __mul__

    def _with_precision(self, bits):
        if bits == self.precision:
            return self
        return PuiseuxSeries(self.ramification, self.valuation, self.coeffs, self.order,
                             self.direction, bits)

    def power(self, q, terms: Optional[int] = None) -> "PuiseuxSeries":
        """``self**q`` for rational ``q``.

        Fractional powers take the positive real root of the leading
        coefficient, so they need a positive leading coefficient.  The
        result keeps the relative precision of the input; an exact input
        raised to a power that is not a nonnegative integer is cut after
        ``terms`` relative terms (default ``DEFAULT_TERMS``).
        """
        q = Fraction(q)
        if self.is_zero:
            raise ValueError("cannot raise the zero series to a power")
        c0 = self.leading
        if q.denominator != 1 and not c0 > 0:
            raise NonPositiveLeading(f"leading coefficient {c0} has no positive real root")
        m = self.ramification
        if self.order == INF and len(self.coeffs) == 1:
            # exact monomial
            with self._ctx():
                lead = rational_power(c0, q)
            return make_series([lead], q * self.valuation, m, INF, self.direction, self.precision)
        if self.order == INF and q.denominator == 1 and q >= 0:
            out = constant(1, self.direction, self.precision)
            for _ in range(int(q)):
                out = out * self
            return out
        n = len(self.coeffs) if self.order != INF else (terms or DEFAULT_TERMS)
        if terms is not None:
            n = min(n, terms)
        with self._ctx():
            lead = rational_power(c0, q)
            ratio = [Fraction(1)] + [_div(c, c0) for c in self.coeffs[1:n]]
            ratio.extend([Fraction(0)] * (n - len(ratio)))
            w = _power_unit(ratio, q, n)
            coeffs = [lead] + [mul(lead, x) for x in w[1:]]
        v = q * self.valuation
        M = math.lcm(m, v.denominator)
        rel = Fraction(n, m)
        s = make_series(coeffs, Fraction(0), m, rel, self.direction, self.precision)
        return s.with_ramification(M).shift(v)

    def derivative(self) -> "PuiseuxSeries":
        """Derivative with respect to ``u`` (not the local variable at infinity)."""
        exps = self.exponents()
        with self._ctx():
            if self.direction == ZERO:
                coeffs = [mul(c, a) for c, a in zip(self.coeffs, exps)]
                shift = Fraction(-1)
            else:
                coeffs = [mul(c, -a) for c, a in zip(self.coeffs, exps)]
                shift = Fraction(1)
        order = self.order + shift if self.order != INF else INF
        return make_series(coeffs, self.valuation + shift, self.ramification, order,
                           self.direction, self.precision)

    def evaluate(self, x):
        """Sum of the known terms at the local variable value ``x > 0``."""
        with self._ctx():
            x = to_mpf(x)
            return mpmath.fsum(to_mpf(c) * x ** to_mpf(a) for a, c in self.terms())

    def max_difference(self, other, upto=None) -> mpf:
        """Largest coefficient difference on the common known range."""
        d = self - other
        with self._ctx(other):
            return max((abs(to_mpf(c)) for a, c in d.terms() if upto is None or a < upto),
                       default=mpf(0))

    # -- serialization ----------------------------------------------------
    def to_json(self, digits: Optional[int] = None) -> dict:
        digits = digits or digits_for(self.precision)
        if self.direction == ZERO:
            base, trunc = self.valuation, self.order
        else:
            base, trunc = -self.valuation, -self.order
        with self._ctx():
            coeffs = [format_number(c, digits) for c in self.coeffs]
        return {
            "schema": SERIES_SCHEMA,
            "direction": self.direction,
            "ramification": self.ramification,
            "base_exponent": format_number(base),
            "coeffs": coeffs,
            "truncation_exponent": None if self.order == INF else format_number(trunc),
            "precision": self.precision,
        }

    @classmethod
    def from_json(cls, data: dict) -> "PuiseuxSeries":
        try:
            direction = data["direction"]
            m = int(data["ramification"])
            base = Fraction(str(data["base_exponent"]))
            raw = data["coeffs"]
            trunc = data.get("truncation_exponent")
            precision = int(data.get("precision", DEFAULT_PRECISION))
        except (KeyError, TypeError, ValueError):
            raise ValidationError("malformed series JSON") from None
        if direction not in (ZERO, INFINITY) or m < 1:
            raise ValidationError("series direction must be 'zero' or 'infinity'")
        with working_precision(precision):
            coeffs = [parse_number(str(c)) for c in raw]
        order = INF if trunc is None else Fraction(str(trunc))
        if direction == INFINITY:
            base = -base
            order = -order if order != INF else INF
        return make_series(coeffs, base, m, order, direction, precision)

    def __repr__(self) -> str:
        var = "u" if self.direction == ZERO else "u^-1"
        body = " + ".join(f"{format_number(c, 8)}*({var})^{a}" for a, c in self.terms()[:6])
        tail = "" if self.order == INF else f" + O(({var})^{self.order})"
        return f"PuiseuxSeries({body or '0'}{tail})"


def _div(a, b):
    if is_exact(a) and is_exact(b):
        return Fraction(a) / Fraction(b)
    return to_mpf(a) / to_mpf(b)


def _convolve(a: Sequence, b: Sequence, n: int) -> list:
    out = []
    for i in range(n):
        acc = None
        for j in range(max(0, i - len(b) + 1), min(i, len(a) - 1) + 1):
            t = mul(a[j], b[i - j])
            acc = t if acc is None else add(acc, t)
        out.append(Fraction(0) if acc is None else acc)
    return out


def _power_unit(p: Sequence, q: Fraction, n: int) -> list:
    """Coefficients of ``(1 + p_1 x + ...)**q`` by the J. C. P. Miller recurrence."""
    w = [Fraction(1)]
    for k in range(1, n):
        acc = Fraction(0)
        for j in range(1, k + 1):
            if _is_zero(p[j]):
                continue
            acc = add(acc, mul((q + 1) * j - k, mul(p[j], w[k - j])))
        w.append(_div(acc, k))
    return w


def make_series(coeffs, valuation=0, ramification: int = 1, order=INF,
                direction: str = ZERO, precision: int = DEFAULT_PRECISION) -> PuiseuxSeries:
    """Normalize and build a series; trailing coefficients beyond ``order`` are dropped."""
    valuation = Fraction(valuation)
    if order != INF:
        order = Fraction(order)
    if (valuation * ramification).denominator != 1:
        raise ValueError("valuation is not on the lattice 1/ramification")
    coeffs = list(coeffs)
    while coeffs and _is_zero(coeffs[0]):
        coeffs.pop(0)
        valuation += Fraction(1, ramification)
    if order == INF:
        while coeffs and _is_zero(coeffs[-1]):
            coeffs.pop()
    else:
        n = _count(valuation, order, ramification)
        coeffs = coeffs[:n]
        if coeffs:
            coeffs.extend([Fraction(0)] * (n - len(coeffs)))
    if not coeffs:
        valuation = order if order != INF else Fraction(0)
    return PuiseuxSeries(ramification, valuation, tuple(coeffs), order, direction, precision)


def constant(c, direction: str = ZERO, precision: int = DEFAULT_PRECISION) -> PuiseuxSeries:
    return make_series([c], 0, 1, INF, direction, precision)


def monomial(c, exponent, direction: str = ZERO, precision: int = DEFAULT_PRECISION) -> PuiseuxSeries:
    exponent = Fraction(exponent)
    return make_series([c], exponent, exponent.denominator, INF, direction, precision)


def power_series(coeffs, order=None, direction: str = ZERO, precision: int = DEFAULT_PRECISION,
                 valuation=0) -> PuiseuxSeries:
    """``sum coeffs[i] x**(valuation+i)``, known for exponents below ``order``
    (exact when ``order`` is None)."""
    return make_series(coeffs, valuation, 1, INF if order is None else order, direction, precision)


# -- the three operations on series types ----------------------------------

def series_root(F: PuiseuxSeries, m: int, terms: Optional[int] = None) -> PuiseuxSeries:
    """``F**(1/m)`` with the positive real root of the leading coefficient."""
    if m == 0:
        raise ValueError("m must be nonzero")
    if F.is_zero or not F.leading > 0:
        raise NonPositiveLeading("series root needs a positive leading coefficient")
    return F.power(Fraction(1, m), terms)


def series_invert(F: PuiseuxSeries, terms: Optional[int] = None) -> PuiseuxSeries:
    """Compositional inverse of a series ``x + O(x**2)`` by Lagrange inversion.

    The ``x**r`` coefficient of the inverse is ``1/r`` times the ``x**(r-1)``
    coefficient of ``(F/x)**-r``.
    """
    G = F.reduced() if not F.is_zero else F
    if G.is_zero or G.valuation != 1 or G.ramification != 1:
        raise NotType11("series_invert needs a power series of the form x + ...")
    with G._ctx():
        if not abs(to_mpf(G.leading) - 1) <= mpf(2) ** (16 - G.precision):
            raise NotType11(f"leading coefficient {G.leading} is not 1")
        if G.order == INF:
            n = terms or DEFAULT_TERMS
        else:
            n = int(G.order - 1)
            if terms is not None:
                n = min(n, terms)
        P = list(G.coeffs[:n]) + [Fraction(0)] * max(0, n - len(G.coeffs))
        ratio = [Fraction(1)] + [_div(c, G.leading) for c in P[1:]]
        lead_inv = _div(1, G.leading)
        out = []
        for r in range(1, n + 1):
            w = _power_unit(ratio, Fraction(-r), r)
            out.append(mul(_div(w[r - 1], r), rational_power(lead_inv, r)))
        out[0] = lead_inv
    return make_series(out, 1, 1, n + 1, G.direction, G.precision)


def series_compose(G: PuiseuxSeries, F: PuiseuxSeries) -> PuiseuxSeries:
    """``G(F(x))`` where ``F`` tends to 0 (positive valuation).

    The result is known below ``min(a_F * O_G, a_F * v_G + O_F - a_F)``,
    with ``a_F`` the valuation of ``F`` and ``v_G``, ``O_G`` the valuation
    and order of ``G``.
    """
    if F.is_zero or F.valuation <= 0:
        raise ExponentClash("the inner series must have positive valuation")
    if G.is_zero:
        return make_series([], 0, 1, F.valuation * G.order, F.direction, max(F.precision, G.precision))
    mG = G.ramification
    if mG > 1 and not F.leading > 0:
        raise ExponentClash("fractional exponents of G need a positive leading coefficient in F")
    prec = max(F.precision, G.precision)
    F = F._with_precision(prec)
    R = F.power(Fraction(1, mG)) if mG > 1 else F
    start = int(G.valuation * mG)
    limit = F.valuation * G.order if G.order != INF else INF
    limit = min(limit, F.valuation * G.valuation + _rel(F))
    T = R.power(start)
    if limit != INF:
        T = T.truncate(limit)
    total = None
    with F._ctx(G):
        for i, g in enumerate(G.coeffs):
            if i:
                T = T * R
                if limit != INF:
                    T = T.truncate(limit)
            if _is_zero(g):
                continue
            term = T * g
            total = term if total is None else total + term
    if total is None:
        total = make_series([], 0, 1, limit, F.direction, prec)
    return total.truncate(limit) if limit != INF else total


def _rel(F: PuiseuxSeries):
    return F.order - F.valuation if F.order != INF else INF


# -- branches of chi(t) = 1 + u at u = infinity ------------------------------

def _scaled_polynomial(shape: WalkShape, K: int, precision: int):
    """``(c, [z_1..z_{K-1}])`` with ``chi(c*tau) - 1 - u = tau**-e P(tau) - u``."""
    e = shape.e
    c = rational_power(shape[-e], Fraction(1, e))
    z = []
    for j in range(1, K):
        k = j - e
        if j == e:
            z.append(to_mpf(shape[0] - 1))
        elif shape[k]:
            z.append(to_mpf(shape[k]) * to_mpf(c) ** k)
        else:
            z.append(mpf(0))
    return c, z


def _inverse_in_tau(z: Sequence, e: int, K: int, precision: int) -> PuiseuxSeries:
    """``G`` with ``G(v)**-e * P(G(v)) = v**-e``, known below ``v**(K+1)``."""
    P = power_series([Fraction(1)] + list(z[:K - 1]), order=K, precision=precision)
    H = P.power(Fraction(-1, e)).shift(1)
    return series_invert(H)


def _reciprocal_log_derivative(z: Sequence, e: int, K: int, precision: int) -> PuiseuxSeries:
    """``S(tau) = 1/(t chi'(t))`` at ``t = c*tau``: a series of type ``(e, -1/e)``."""
    Q = [Fraction(1)] + [mul(Fraction(e - j, e), z[j - 1]) for j in range(1, K)]
    base = power_series(Q, order=K, precision=precision) * (-e)
    return base.power(-1).shift(e)


def _minus_gamma_and_alpha(shape: WalkShape, order: int, precision: int):
    e = shape.e
    K = e * order
    c, z = _scaled_polynomial(shape, K + 1, precision)
    G = _inverse_in_tau(z, e, K, precision)
    S = _reciprocal_log_derivative(z, e, K, precision)
    gamma = series_compose(S, G)
    v = Fraction(1, e)
    gamma = make_series(gamma.coeffs, gamma.valuation, gamma.ramification, gamma.order,
                        INFINITY, precision).scale_variable(v)
    alpha = make_series(G.coeffs, G.valuation, G.ramification, G.order, INFINITY,
                        precision).scale_variable(v) * c
    return gamma, alpha


def _check_order(order: int):
    if order < 1:
        raise ValueError("order must be at least 1")


def alpha_branches(shape: WalkShape, order: int = 4, precision: int = DEFAULT_PRECISION):
    """``(alpha_minus, alpha_plus)``: the solutions of ``chi(alpha) = 1 + u``
    in ``(0, 1]`` and ``[1, oo)`` expanded at ``u = oo``.

    ``alpha_minus`` starts ``kappa_{-e}**(1/e) u**(-1/e)``, ``alpha_plus``
    starts ``kappa_f**(-1/f) u**(1/f)``; both are known to relative depth
    ``order`` in powers of ``u``.
    """
    _check_order(order)
    with working_precision(precision):
        _, a_minus = _minus_gamma_and_alpha(shape, order, precision)
        _, a_ref = _minus_gamma_and_alpha(reindex(shape, -1), order, precision)
        a_plus = a_ref.power(-1)
    return a_minus, a_plus


@dataclass(frozen=True)
class BranchPair:
    gamma_plus: PuiseuxSeries
    gamma_minus: PuiseuxSeries

    @property
    def e(self) -> int:
        return _degree_from_lead(self.gamma_minus, -1)

    @property
    def f(self) -> int:
        return _degree_from_lead(self.gamma_plus, 1)

    def to_json(self) -> dict:
        return {"schema": "walkspec.branches/1",
                "gamma_plus": self.gamma_plus.to_json(),
                "gamma_minus": self.gamma_minus.to_json()}


def _degree_from_lead(g: PuiseuxSeries, sign: int) -> int:
    lead = g.coeff(1)
    if is_exact(lead):
        inv = sign / Fraction(lead)
        if inv.denominator == 1 and inv > 0:
            return int(inv)
    with g._ctx():
        val = sign / to_mpf(lead)
        d = int(mpmath.nint(val))
        if d < 1 or abs(val - d) > mpf(2) ** (16 - g.precision):
            raise ValidationError(f"u^-1 coefficient {lead} is not +-1/integer")
    return d


def gamma_branches(shape: WalkShape, order: int = 4, precision: int = DEFAULT_PRECISION) -> BranchPair:
    """``gamma_plus``, ``gamma_minus = 1/(alpha chi'(alpha))`` on each branch at ``u = oo``.

    Leading terms are exactly ``u**-1/f`` and ``-u**-1/e``; the series are
    known for ``u``-exponents above ``-1-order``.
    """
    _check_order(order)
    with working_precision(precision):
        g_minus, _ = _minus_gamma_and_alpha(shape, order, precision)
        g_ref, _ = _minus_gamma_and_alpha(reindex(shape, -1), order, precision)
    return BranchPair(-g_ref, g_minus)


def gamma_diff_at_infinity(shape: WalkShape, order: int = 4, precision: int = DEFAULT_PRECISION) -> PuiseuxSeries:
    """``gamma_plus - gamma_minus`` on the lattice ``1/lcm(e, f)``.

    The ``u**-1`` coefficient is the exact Fraction ``1/e + 1/f``.
    """
    pair = gamma_branches(shape, order, precision)
    return pair.gamma_plus - pair.gamma_minus


def lattice_collisions(e: int, f: int, order: int) -> List[Fraction]:
    """Non-integer ``u``-exponents below ``-1`` and above ``-1-order`` that both
    branch lattices reach; coefficients there mix the two branches."""
    g = math.gcd(e, f)
    out = []
    for k in range(1, g * order):
        q = -1 - Fraction(k, g)
        if q.denominator != 1:
            out.append(q)
    return out


# -- branches at u = 0 ---------------------------------------------------------

def _x_of_root(shape: WalkShape, order: int, precision: int):
    """``(X, beta)`` with ``x = X(y / beta)`` inverting ``y = sqrt(chi(e**x) - 1)``.

    ``X`` has exact rational coefficients; ``beta = sqrt(J_2 / 2)``.
    """
    R = 2 * order + 1
    J = moments(shape, R + 2)
    J2 = J[2]
    # (chi(e**x) - 1) / (J_2 x**2 / 2) = 1 + sum 2 J_n x**(n-2) / (J_2 n!)
    unit = [Fraction(1)] + [2 * J[n] / (J2 * math.factorial(n)) for n in range(3, R + 2)]
    W = power_series(unit, order=R, precision=precision).power(Fraction(1, 2))
    X = series_invert(W.shift(1))
    beta = rational_power(J2 / 2, Fraction(1, 2))
    return X, beta


def gamma_branches_at_zero(shape: WalkShape, order: int = 2, precision: int = DEFAULT_PRECISION) -> BranchPair:
    """``dx/du`` on the two real branches of ``u = chi(e**x) - 1`` near ``u = 0``.

    ``gamma_plus`` belongs to ``x > 0``; both are series in ``u**(1/2)``
    known below ``u**order``.
    """
    if not shape.unbiased:
        raise Biased("expansion at u = 0 needs an unbiased shape")
    _check_order(order)
    with working_precision(precision):
        X, beta = _x_of_root(shape, order, precision)
        h = X.scale_argument(_div(1, beta)) if is_exact(beta) else X.scale_argument(1 / to_mpf(beta))
        branches = []
        for sign in (1, -1):
            x = h.scale_variable(Fraction(1, 2), sign)
            branches.append(x.derivative())
    return BranchPair(branches[0], branches[1])


def gamma_diff_at_zero(shape: WalkShape, order: int = 2, precision: int = DEFAULT_PRECISION) -> PuiseuxSeries:
    """``gamma_plus - gamma_minus`` at ``u = 0``, known below ``u**order``.

    Starts ``sqrt(2/J_2) u**(-1/2)``; integer exponents cancel between the
    branches.  The Laplace transform of this series is ``2 pi`` times the
    real-exponential integral of the shape.
    """
    if order < 0:
        raise ValueError("order must be nonnegative")
    pair = gamma_branches_at_zero(shape, max(order, 1), precision)
    return (pair.gamma_plus - pair.gamma_minus).truncate(Fraction(order))


def laplace_coefficients(diff: PuiseuxSeries) -> List[Tuple[Fraction, object]]:
    """Term-by-term Laplace transform over ``2 pi``: ``(q, c_q Gamma(q+1) / (2 pi))``.

    The coefficient pairs with ``s**(-q-1)``.
    """
    if diff.direction != ZERO:
        raise ValueError("Laplace coefficients need a series at u = 0")
    out = []
    with diff._ctx():
        for q, c in diff.terms():
            if _is_zero(c):
                continue
            out.append((q, to_mpf(c) * mpmath.gamma(to_mpf(q) + 1) / (2 * mp.pi)))
    return out
