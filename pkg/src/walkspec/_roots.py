"""Exact univariate polynomials over Q and Sturm-sequence root isolation.

Polynomials are lists of Fractions, constant term first.
"""
from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence, Tuple

Poly = List[Fraction]


def strip(p: Sequence) -> Poly:
    p = [Fraction(c) for c in p]
    while p and p[-1] == 0:
        p.pop()
    return p


def degree(p: Poly) -> int:
    return len(p) - 1


def evaluate(p: Poly, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def derivative(p: Poly) -> Poly:
    return strip([k * c for k, c in enumerate(p)][1:])


def divmod_poly(a: Poly, b: Poly) -> Tuple[Poly, Poly]:
    a, b = strip(a), strip(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    lead = b[-1]
    while len(r) >= len(b) and r:
        shift = len(r) - len(b)
        factor = r[-1] / lead
        q[shift] = factor
        for i, c in enumerate(b):
            r[i + shift] -= factor * c
        r = strip(r)
    return strip(q), r


def gcd(a: Poly, b: Poly) -> Poly:
    a, b = strip(a), strip(b)
    while b:
        a, b = b, divmod_poly(a, b)[1]
    if not a:
        return a
    return [c / a[-1] for c in a]


def squarefree_part(p: Poly) -> Poly:
    g = gcd(p, derivative(p))
    if degree(g) <= 0:
        return strip(p)
    return divmod_poly(p, g)[0]


def sturm_sequence(p: Poly) -> List[Poly]:
    seq = [strip(p), derivative(p)]
    while seq[-1]:
        r = divmod_poly(seq[-2], seq[-1])[1]
        seq.append([-c for c in r])
    return seq[:-1]


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


def _variations(seq: List[Poly], x: Fraction) -> int:
    signs = [s for s in (_sign(evaluate(p, x)) for p in seq) if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(seq: List[Poly], lo: Fraction, hi: Fraction) -> int:
    """Number of distinct real roots in the half-open interval (lo, hi]."""
    return _variations(seq, lo) - _variations(seq, hi)


def cauchy_bound(p: Poly) -> Fraction:
    p = strip(p)
    lead = abs(p[-1])
    return 1 + max((abs(c) / lead for c in p[:-1]), default=Fraction(0))


def isolate_real_roots(p: Poly, lo: Fraction, hi: Fraction) -> List[Tuple[Fraction, Fraction]]:
    """Disjoint intervals (a, b] each holding exactly one root of ``p`` in (lo, hi]."""
    p = squarefree_part(p)
    if degree(p) < 1:
        return []
    seq = sturm_sequence(p)
    out = []
    stack = [(Fraction(lo), Fraction(hi))]
    while stack:
        a, b = stack.pop()
        n = count_roots(seq, a, b)
        if n == 0:
            continue
        if n == 1:
            out.append((a, b))
            continue
        mid = (a + b) / 2
        stack.append((mid, b))
        stack.append((a, mid))
    return sorted(out)


def refine_root(p: Poly, a: Fraction, b: Fraction, bits: int) -> Tuple[Fraction, Fraction]:
    """Bisect an isolating interval (a, b] of a simple root until b - a < 2**-bits."""
    p = squarefree_part(p)
    if evaluate(p, b) == 0:
        return b, b
    width = Fraction(1, 2 ** bits)
    sb = _sign(evaluate(p, b))
    while b - a >= width:
        mid = (a + b) / 2
        # dyadic midpoints keep denominators small
        sm = _sign(evaluate(p, mid))
        if sm == 0:
            return mid, mid
        if sm == sb:
            b = mid
        else:
            a = mid
    return a, b


def recognize_rational_root(p: Poly, approx, max_denominator_bits: int = 64):
    """Return a rational root of ``p`` near ``approx`` if one exists with a
    denominator below ``2**max_denominator_bits``, else ``None``."""
    from ._numeric import to_fraction

    target = to_fraction(approx)
    bound = 1
    while bound <= 2 ** max_denominator_bits:
        cand = target.limit_denominator(bound)
        if evaluate(p, cand) == 0:
            return cand
        bound *= 16
    return None
