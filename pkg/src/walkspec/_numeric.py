"""Mixed exact/arbitrary-precision number helpers.

Values flowing through the package are either exact (``int`` or
:class:`fractions.Fraction`) or :class:`mpmath.mpf`.  ``Fraction - mpf``
is not supported by mpmath, so arithmetic that may mix the two goes
through :func:`lift` first.
"""
from __future__ import annotations

import contextlib
import math
from fractions import Fraction
from numbers import Rational

import mpmath
from mpmath import libmp, mp, mpf
from sympy import integer_nthroot

DEFAULT_PRECISION = 256
GUARD_BITS = 32


def is_exact(x) -> bool:
    return isinstance(x, Rational)


def to_mpf(x) -> mpf:
    if isinstance(x, mpf):
        return x
    if isinstance(x, Rational):
        # one correctly rounded conversion, so order between rationals is preserved
        return mp.make_mpf(libmp.from_rational(int(x.numerator), int(x.denominator), mp.prec, libmp.round_nearest))
    if isinstance(x, str):
        return to_mpf(parse_number(x))
    return mpf(x)


def to_fraction(x) -> Fraction:
    """Exact rational value of ``x`` (an mpf is a dyadic rational)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    x = to_mpf(x)
    man, exp = x.man_exp
    if man == 0:
        return Fraction(0)
    return Fraction(man) * (Fraction(2) ** exp)


def lift(a, b):
    """Return ``(a, b)`` converted to a common representation."""
    if is_exact(a) and is_exact(b):
        return a, b
    return to_mpf(a), to_mpf(b)


def add(a, b):
    a, b = lift(a, b)
    return a + b


def sub(a, b):
    a, b = lift(a, b)
    return a - b


def mul(a, b):
    a, b = lift(a, b)
    return a * b


def div(a, b):
    if is_exact(a) and is_exact(b):
        return Fraction(a) / Fraction(b)
    a, b = lift(a, b)
    return a / b


def is_zero(x) -> bool:
    return x == 0


def rational_power(b, q: Fraction):
    """``b**q`` (positive real root for fractional ``q``), exact when possible."""
    q = Fraction(q)
    if is_exact(b):
        b = Fraction(b)
        if q.denominator == 1:
            return b ** q.numerator
        if b > 0:
            p = b ** q.numerator
            r = q.denominator
            num, num_exact = integer_nthroot(p.numerator, r)
            den, den_exact = integer_nthroot(p.denominator, r)
            if num_exact and den_exact:
                return Fraction(num, den)
    b = to_mpf(b)
    if q.denominator == 1:
        return b ** q.numerator
    return b ** (mpf(q.numerator) / q.denominator)


def parse_number(text: str):
    """Parse ``"p/q"`` or an integer as a Fraction, anything else as mpf."""
    text = text.strip()
    try:
        return Fraction(text) if ("/" in text or _is_int(text)) else to_mpf(mpf(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a number: {text!r}") from exc


def _is_int(text: str) -> bool:
    return text.lstrip("+-").isdigit()


def format_number(x, digits: int | None = None) -> str:
    if is_exact(x):
        x = Fraction(x)
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if digits is None:
        digits = max(15, int(mp.prec * math.log10(2)))
    return mpmath.nstr(to_mpf(x), digits, min_fixed=-math.inf, max_fixed=math.inf)


def digits_for(bits: int) -> int:
    return max(15, int(bits * math.log10(2)) + 1)


@contextlib.contextmanager
def working_precision(bits: int, guard: int = GUARD_BITS):
    """Run a block at ``bits`` (plus guard bits) of mpmath precision."""
    if bits < 2:
        raise ValueError("precision must be at least 2 bits")
    with mp.workprec(int(bits) + guard):
        yield


def tolerance(bits: int, slack_bits: int = 16) -> mpf:
    return mpf(2) ** (slack_bits - int(bits))
