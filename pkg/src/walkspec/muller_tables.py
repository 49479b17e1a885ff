"""Primitive permutation groups with an element of exactly two cycles.

Transcription of the classification of primitive groups of degree ``n``
containing an element with two cycles of lengths ``e <= f`` (``e + f = n``),
split into affine, product and sporadic actions.  Rows whose degree is a
formula (``p^m``, ``r^2``, ...) carry a membership test so they can be
queried for a concrete ``n``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt
from typing import Callable, Dict, List, Optional, Tuple

from sympy import factorint, isprime

AFFINE, PRODUCT, SPORADIC = "affine", "product", "sporadic"


def _prime_power(n: int) -> Optional[Tuple[int, int]]:
    if n < 2:
        return None
    f = factorint(n)
    if len(f) != 1:
        return None
    (p, m), = f.items()
    return p, m


@dataclass(frozen=True)
class MullerTableRow:
    table: str
    label: str
    group: str
    order: str
    simple_factors: str
    n: str
    e_options: str
    inverse_sum: str
    # concrete n -> parameter dict, or None when the row does not apply
    matcher: Optional[Callable[[int], Optional[Dict[str, int]]]] = field(default=None, compare=False, repr=False)

    def match(self, n: int) -> Optional[Dict[str, int]]:
        if self.matcher is not None:
            return self.matcher(n)
        return {} if self.n.isdigit() and int(self.n) == n else None

    def to_json(self) -> dict:
        return {
            "table": self.table, "label": self.label, "group": self.group, "order": self.order,
            "simple_factors": self.simple_factors, "n": self.n, "e": self.e_options,
            "1/e+1/f": self.inverse_sum,
        }


def _m_prime_power(n):
    pm = _prime_power(n)
    return {"p": pm[0], "m": pm[1]} if pm else None


def _m_prime_power_m2(n):
    pm = _prime_power(n)
    return {"p": pm[0], "m": pm[1]} if pm and pm[1] >= 2 else None


def _m_odd_prime_square(n):
    r = isqrt(n)
    return {"p": r} if r * r == n and r > 2 and isprime(r) else None


def _m_two_power_m3(n):
    pm = _prime_power(n)
    return {"m": pm[1]} if pm and pm[0] == 2 and pm[1] >= 3 else None


def _m_square_r5(n):
    r = isqrt(n)
    if r * r != n or r < 5:
        return None
    return {"r": r, "a": [a for a in range(1, r) if gcd(a, n) == 1]}


def _m_prime_plus_one_squared(n):
    r = isqrt(n)
    return {"p": r - 1} if r * r == n and r - 1 >= 5 and isprime(r - 1) else None


def _m_alternating(n):
    return {"n": n} if n >= 6 else None


def _m_prime_plus_one(n):
    return {"p": n - 1} if n >= 3 and isprime(n - 1) else None


def _m_projective(n):
    # n = (q^m - 1)/(q - 1) for an odd prime power q and m >= 2, with e = n/2 integral
    if n % 2:
        return None
    for q in range(3, n):
        pm = _prime_power(q)
        if not pm or q % 2 == 0:
            continue
        total, m = 1 + q, 2
        while total < n:
            total += q ** m
            m += 1
        if total == n:
            return {"q": q, "m": m}
    return None


_ROWS = [
    # affine
    MullerTableRow(AFFINE, "(a)", "> F_{p^m} : GL_{m/t}(p^t)", "~p^{m+m^2/t}", "0 or 1", "p^m", "1",
                   "p^m/(p^m-1)", _m_prime_power),
    MullerTableRow(AFFINE, "(b)", "F_2^2 : GL_2(2)", "24", "0", "4", "2", "1"),
    MullerTableRow(AFFINE, "(b)", "F_2^3 : GL_3(2)", "1344", "1", "8", "2", "2/3"),
    MullerTableRow(AFFINE, "(b)", "F_2^4 : GL_4(2)", "322560", "1", "16", "2", "4/7"),
    MullerTableRow(AFFINE, "(b)", "F_3^2 : GL_2(3)", "432", "0", "9", "3", "1/2"),
    MullerTableRow(AFFINE, "(b)", "F_5^2 : GL_2(5)", "12000", "1", "25", "5", "1/4"),
    MullerTableRow(AFFINE, "(b)", "F_p^m : GL_m(p)", "~p^{m^2+m}", "1", "p^m", "p",
                   "p^{m-2}/(p^{m-1}-1)", _m_prime_power_m2),
    MullerTableRow(AFFINE, "(c)", "F_p^2 : N, p>2", "<= 2(p-1)p^2", "0", "p^2", "p", "1/(p-1)",
                   _m_odd_prime_square),
    MullerTableRow(AFFINE, "(d)", "F_2^m : GL_m(2)", "~2^{m^2+m}", "1", "2^m", "4",
                   "2^{m-4}/(2^{m-2}-1)", _m_two_power_m3),
    MullerTableRow(AFFINE, "(e)", "A_4", "12", "0", "4", "2", "1"),
    MullerTableRow(AFFINE, "(e)", "F_8 : (F_8^x : C_3)", "96", "0", "8", "2", "2/3"),
    MullerTableRow(AFFINE, "(e)", "F_9 : (F_9^x : C_2)", "108", "0", "9", "3", "1/2"),
    MullerTableRow(AFFINE, "(e)", "F_16 : (C_5 : C_4)", "320", "0", "16", "8", "1/4"),
    MullerTableRow(AFFINE, "(e)", "F_16 : (F_16^x : C_4)", "512", "0", "16", "8", "1/4"),
    MullerTableRow(AFFINE, "(e)", "F_16 : (C_3^2 : C_4)", "576", "0", "16", "8", "1/4"),
    MullerTableRow(AFFINE, "(e)", "F_16 : (SL_2(4) : C_2)", "1920", "1", "16", "8", "1/4"),
    MullerTableRow(AFFINE, "(e)", "F_16 : (GL_2(4) : C_2)", "1152", "1", "16", "8", "1/4"),
    MullerTableRow(AFFINE, "(e)", "F_16 : A_6", "5760", "1", "16", "8", "1/4"),
    MullerTableRow(AFFINE, "(e)", "F_16 : GL_4(2)", "322560", "1", "16", "8", "1/4"),
    MullerTableRow(AFFINE, "(e)", "F_16 : (S_3^2 : C_2)", "1152", "0", "16", "4 or 8", "1/3 or 1/4"),
    MullerTableRow(AFFINE, "(e)", "F_16 : S_5", "1920", "1", "16", "4 or 8", "1/3 or 1/4"),
    MullerTableRow(AFFINE, "(e)", "F_16 : S_6", "11520", "1", "16", "4 or 8", "1/3 or 1/4"),
    MullerTableRow(AFFINE, "(e)", "F_16 : A_7", "40320", "1", "16", "2 or 8", "4/7 or 1/4"),
    MullerTableRow(AFFINE, "(e)", "F_25 : G_1", "2400", "0", "25", "5", "1/4"),
    # product
    MullerTableRow(PRODUCT, "(a)", "S_r^2 : C_2 (r>=5)", "2 r!^2", "2", "r^2", "ar, (a,n)=1",
                   "1/(a(r-a))", _m_square_r5),
    MullerTableRow(PRODUCT, "(b)", "PGL_2(p)^2 : C_2 (p>=5)", "2(p^3-p)^2", "2", "(p+1)^2", "p+1",
                   "1/p", _m_prime_plus_one_squared),
    # sporadic
    MullerTableRow(SPORADIC, "(a)", "A_5", "60", "1", "5", "1 or 2", "5/4 or 5/6"),
    MullerTableRow(SPORADIC, "(a)", "S_5", "120", "1", "5", "1 or 2", "5/4 or 5/6"),
    MullerTableRow(SPORADIC, "(a)", "A_n (n>=6)", "n!/2", "1", "n", "1,...,floor(n/2)", "n/(e(n-e))",
                   _m_alternating),
    MullerTableRow(SPORADIC, "(a)", "S_n (n>=6)", "n!", "1", "n", "1,...,floor(n/2)", "n/(e(n-e))",
                   _m_alternating),
    MullerTableRow(SPORADIC, "(b)", "A_5", "60", "1", "10", "5", "2/5"),
    MullerTableRow(SPORADIC, "(b)", "S_5", "120", "1", "10", "5", "2/5"),
    MullerTableRow(SPORADIC, "(c)", "> PSL_2(p)", "<= p^3-p", "0 or 1", "p+1", "1", "(p+1)/p",
                   _m_prime_plus_one),
    MullerTableRow(SPORADIC, "(d)", "> PSL_m(q) (q odd)", "~q^{m^2-1}", "1", "(q^m-1)/(q-1)",
                   "(q^m-1)/(2(q-1))", "4(q-1)/(q^m-1)", _m_projective),
    MullerTableRow(SPORADIC, "(e)", "M_10", "720", "1", "10", "2", "5/8"),
    MullerTableRow(SPORADIC, "(e)", "M_10 : C_2", "1440", "1", "10", "2", "5/8"),
    MullerTableRow(SPORADIC, "(f)", "PSL_3(4) : C_2", "40320", "1", "21", "7", "3/14"),
    MullerTableRow(SPORADIC, "(f)", "PGL_3(4) : C_2", "80640", "1", "21", "7", "3/14"),
    MullerTableRow(SPORADIC, "(g)", "M_11", "7920", "1", "12", "1 or 4", "12/11 or 8/3"),
    MullerTableRow(SPORADIC, "(h)", "M_12", "95040", "1", "12", "1, 2, 4, or 6", "12/11, 3/5, 3/8, or 1/3"),
    MullerTableRow(SPORADIC, "(i)", "M_22", "443520", "1", "22", "11", "2/11"),
    MullerTableRow(SPORADIC, "(i)", "M_22 : C_2", "887040", "1", "22", "11", "2/11"),
    MullerTableRow(SPORADIC, "(j)", "M_24", "244823040", "1", "24", "1, 3, or 12", "24/23, 8/21, or 1/6"),
]


def muller_tables() -> List[MullerTableRow]:
    """Every row of the three tables, in table order."""
    return list(_ROWS)


def rows_for_n(n: int, families: bool = True) -> List[Tuple[MullerTableRow, Dict]]:
    """Rows whose degree can equal ``n``, with the parameters that realize it.

    With ``families=False`` only rows listing ``n`` as a literal number are
    returned, so infinite families such as ``A_n`` are left out.
    """
    out = []
    for row in _ROWS:
        if not families and not row.n.isdigit():
            continue
        params = row.match(n)
        if params is not None:
            out.append((row, params))
    return out
