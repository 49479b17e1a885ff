"""Walk shapes: exact step distributions on the integers.

A shape is the Laurent polynomial ``chi(t) = sum_k kappa_k t**k`` whose
coefficients are the step probabilities.  Everything here is exact
rational arithmetic except :func:`scale_equivalents`, which refines an
algebraic scale factor to a requested number of bits.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, Iterable, List, Mapping, Tuple

from mpmath import mpf

from . import _roots
from ._numeric import DEFAULT_PRECISION, to_fraction, to_mpf, working_precision
from .errors import (
    Biased,
    MassNotOne,
    NegativeCoefficient,
    NoNegativeSupport,
    NoPositiveSupport,
    PrecisionExhausted,
    ValidationError,
)

SHAPE_SCHEMA = "walkspec.shape/1"


@dataclass(frozen=True)
class WalkShape:
    """Validated step distribution; build it with :func:`new_shape`.

    ``coeffs`` holds only the nonzero probabilities, keyed by exponent.
    """

    items: Tuple[Tuple[int, Fraction], ...]
    unbiased: bool = field(compare=False)

    @cached_property
    def coeffs(self) -> Dict[int, Fraction]:
        return dict(self.items)

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(k for k, _ in self.items)

    @property
    def e(self) -> int:
        return -self.items[0][0]

    @property
    def f(self) -> int:
        return self.items[-1][0]

    @property
    def degree(self) -> int:
        return self.e + self.f

    @property
    def mass(self) -> Fraction:
        return sum((c for _, c in self.items), Fraction(0))

    @property
    def mean(self) -> Fraction:
        return sum((k * c for k, c in self.items), Fraction(0))

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs.get(k, Fraction(0))

    def __call__(self, t):
        """Evaluate chi at ``t`` (exact for rational ``t``)."""
        if isinstance(t, (int, Fraction)):
            t = Fraction(t)
            return sum((c * t ** k for k, c in self.items), Fraction(0))
        t = to_mpf(t)
        return sum((to_mpf(c) * t ** k for k, c in self.items), mpf(0))

    def derivative(self, t):
        if isinstance(t, (int, Fraction)):
            t = Fraction(t)
            return sum((k * c * t ** (k - 1) for k, c in self.items), Fraction(0))
        t = to_mpf(t)
        return sum((k * to_mpf(c) * t ** (k - 1) for k, c in self.items), mpf(0))

    def integer_weights(self) -> Tuple[int, Dict[int, int]]:
        """``(d, w)`` with ``chi = (1/d) sum_k w_k t**k`` and integer ``w_k``."""
        d = math.lcm(*(c.denominator for _, c in self.items))
        return d, {k: int(c * d) for k, c in self.items}

    def numerator_polynomial(self) -> List[Fraction]:
        """Coefficients of ``t**e * chi(t)``, constant term first."""
        out = [Fraction(0)] * (self.degree + 1)
        for k, c in self.items:
            out[k + self.e] = c
        return out

    def to_json(self) -> dict:
        return {
            "schema": SHAPE_SCHEMA,
            "coeffs": {str(k): _format_fraction(c) for k, c in self.items},
        }

    def __repr__(self) -> str:
        body = ", ".join(f"{k}: {_format_fraction(c)}" for k, c in self.items)
        return f"WalkShape({{{body}}})"


def _format_fraction(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def new_shape(
    coeffs: Mapping[int, object],
    require_unbiased: bool = False,
    mass_tolerance=0,
) -> WalkShape:
    """Validate a coefficient map and build a :class:`WalkShape`.

    Values may be ints, Fractions, ``"p/q"`` strings or mpf numbers (the
    latter are converted exactly).  ``mass_tolerance`` relaxes the
    ``chi(1) == 1`` check for shapes produced by numerical rescaling.
    """
    clean: Dict[int, Fraction] = {}
    for k, v in coeffs.items():
        c = to_fraction(v)
        if c < 0:
            raise NegativeCoefficient(f"kappa_{k} = {c} is negative")
        if c != 0:
            clean[int(k)] = clean.get(int(k), Fraction(0)) + c
    if not clean:
        raise MassNotOne("empty coefficient map")
    items = tuple(sorted(clean.items()))
    mass = sum(clean.values(), Fraction(0))
    if abs(mass - 1) > Fraction(to_fraction(mass_tolerance)):
        raise MassNotOne(f"coefficients sum to {mass}, not 1")
    if items[0][0] >= 0:
        raise NoNegativeSupport("support has no negative exponent")
    if items[-1][0] <= 0:
        raise NoPositiveSupport("support has no positive exponent")
    mean = sum((k * c for k, c in items), Fraction(0))
    if require_unbiased and mean != 0:
        raise Biased(f"mean step is {mean}, not 0")
    return WalkShape(items, unbiased=(mean == 0))


def shape_from_json(data) -> WalkShape:
    """Parse the JSON shape format; ``data`` is a str or an already-decoded dict."""
    if isinstance(data, (str, bytes)):
        data = json.loads(data, object_pairs_hook=_reject_duplicates)
    try:
        raw = data["coeffs"]
    except (KeyError, TypeError):
        raise ValidationError("shape JSON needs a 'coeffs' object") from None
    coeffs = {}
    for key, value in raw.items():
        try:
            k = int(key)
        except ValueError:
            raise ValidationError(f"exponent key {key!r} is not an integer") from None
        if not isinstance(value, str):
            value = str(value)
        try:
            coeffs[k] = Fraction(value)
        except (ValueError, ZeroDivisionError):
            raise ValidationError(f"coefficient {value!r} is not a rational") from None
    return new_shape(coeffs)


def _reject_duplicates(pairs):
    out = {}
    for key, value in pairs:
        if key in out:
            raise ValidationError(f"duplicate key {key!r}")
        out[key] = value
    return out


def load_json(text: str):
    """``json.loads`` that rejects duplicate object keys."""
    return json.loads(text, object_pairs_hook=_reject_duplicates)


@dataclass(frozen=True)
class MomentVector:
    """Raw moments ``J_2 .. J_m``; index with ``mv[n]``."""

    values: Tuple[Fraction, ...]

    def __getitem__(self, n: int) -> Fraction:
        if n < 2 or n - 2 >= len(self.values):
            raise IndexError(n)
        return self.values[n - 2]

    @property
    def m(self) -> int:
        return len(self.values) + 1


def moments(shape: WalkShape, m: int) -> MomentVector:
    if m < 2:
        raise ValueError("m must be at least 2")
    return MomentVector(
        tuple(sum((c * k ** n for k, c in shape.items), Fraction(0)) for n in range(2, m + 1))
    )


def support_gcd(shape: WalkShape) -> int:
    return math.gcd(*shape.support)


def reindex(shape: WalkShape, n: int) -> WalkShape:
    """The shape ``chi(t**n)``; ``n = -1`` is the reflection."""
    if n == 0:
        raise ValueError("n must be nonzero")
    return new_shape({k * n: c for k, c in shape.items})


class Equivalence(enum.Enum):
    IDENTICAL = "Identical"
    REFLECTED = "Reflected"
    NO = "No"


def equivalent(a: WalkShape, b: WalkShape) -> Equivalence:
    if a.items == b.items:
        return Equivalence.IDENTICAL
    if a.items == reindex(b, -1).items:
        return Equivalence.REFLECTED
    return Equivalence.NO


def scale_equivalents(shape: WalkShape, precision: int = DEFAULT_PRECISION) -> List[Tuple[object, WalkShape]]:
    """All ``lambda > 0, lambda != 1`` with ``chi(lambda) = 1``, paired with
    the isospectral shape ``chi(lambda t)``.

    Roots of ``t**e (chi(t) - 1)`` are isolated exactly by Sturm sequences
    and bisected to ``precision`` bits.  Rational roots are returned as
    Fractions with an exact rescaled shape; otherwise ``lambda`` is an mpf
    and the rescaled shape is rounded, with mass within ``2**(8-precision)``.
    """
    poly = shape.numerator_polynomial()
    poly[shape.e] -= 1
    # t = 1 is always a root
    poly, _ = _roots.divmod_poly(poly, [Fraction(-1), Fraction(1)])
    while _roots.evaluate(poly, Fraction(1)) == 0:
        poly, _ = _roots.divmod_poly(poly, [Fraction(-1), Fraction(1)])
    if _roots.degree(poly) < 1:
        return []
    out = []
    bound = _roots.cauchy_bound(poly)
    for a, b in _roots.isolate_real_roots(poly, Fraction(0), bound):
        # enough bits for limit_denominator to see denominators up to 2**64
        a, b = _roots.refine_root(poly, a, b, 136)
        exact = _roots.recognize_rational_root(poly, (a + b) / 2, 64)
        if exact is not None and exact > 0:
            out.append((exact, new_shape({k: c * exact ** k for k, c in shape.items})))
            continue
        a, b = _roots.refine_root(poly, a, b, precision + 8)
        if b - a > Fraction(1, 2 ** (precision + 8)):
            raise PrecisionExhausted("root refinement did not reach the requested width")
        with working_precision(precision):
            lam = to_mpf((a + b) / 2)
            scaled = {k: to_fraction(to_mpf(c) * lam ** k) for k, c in shape.items}
            tol = Fraction(2) ** (8 - precision)
            out.append((+lam, new_shape(scaled, mass_tolerance=tol)))
    return out


def simple_walk() -> WalkShape:
    """The symmetric simple walk ``(t + 1/t) / 2``."""
    return new_shape({-1: Fraction(1, 2), 1: Fraction(1, 2)})


def lazy_walk() -> WalkShape:
    """``t**-1 / 4 + 1/2 + t / 4``."""
    return new_shape({-1: Fraction(1, 4), 0: Fraction(1, 2), 1: Fraction(1, 4)})


def shapes_equal_within(a: WalkShape, b: WalkShape, tol) -> bool:
    """Coefficientwise comparison with absolute tolerance ``tol``."""
    keys = set(a.support) | set(b.support)
    tol = to_fraction(tol)
    return all(abs(a[k] - b[k]) <= tol for k in keys)


def max_coefficient_distance(a: WalkShape, b: WalkShape) -> Fraction:
    keys = set(a.support) | set(b.support)
    return max(abs(a[k] - b[k]) for k in keys)


def as_shape(obj) -> WalkShape:
    """Accept a WalkShape or a plain coefficient mapping."""
    if isinstance(obj, WalkShape):
        return obj
    if isinstance(obj, Mapping):
        return new_shape(obj)
    raise TypeError(f"cannot interpret {type(obj).__name__} as a walk shape")


def iter_coefficients(shape: WalkShape) -> Iterable[Tuple[int, Fraction]]:
    return iter(shape.items)
