import math
from fractions import Fraction as F

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from walkspec import (AmbiguousLattice, DegreesEqual, InsufficientData, MissingOrders, NoSolution, NotE1,
                      fix_scales, gamma_branches, gamma_diff_at_infinity, guarantee, half_shape_from_series,
                      lazy_walk, new_shape, reconstruct_e1, reconstruct_from_branches, reconstruct_from_diff,
                      return_probabilities, simple_walk)
from walkspec.moment_map import sample
from walkspec.puiseux import INFINITY, make_series
from walkspec.reconstruct import (CLEAN, EXCEPTIONAL, GENERIC, MAIN, MINUS, PLUS, guarantee_for_shape,
                                  project_to_affine)
from walkspec.spectrum import Spectrum
from walkspec.walk_core import max_coefficient_distance

from conftest import unbiased_shapes

ONE_TWO = new_shape({-1: F(2, 3), 2: F(1, 3)})
PREC = 256


def spec_of(*vals):
    return Spectrum(tuple(F(v) for v in vals))


# -- single negative step

def test_e1_hand_example():
    assert reconstruct_e1(spec_of(0, 0, F(4, 9)), 2) == ONE_TWO


def test_e1_lazy_and_simple():
    assert reconstruct_e1(spec_of(F(1, 2), F(3, 8)), 1) == lazy_walk()
    assert reconstruct_e1(spec_of(0, F(1, 2)), 1) == simple_walk()


def test_e1_errors():
    with pytest.raises(InsufficientData):
        reconstruct_e1(spec_of(0, F(1, 2)), 2)
    with pytest.raises(NotE1):
        reconstruct_e1(spec_of(0, 0), 1)


@given(st.integers(1, 6), st.integers(0, 2 ** 32 - 1))
def test_e1_exact_recovery(f, seed):
    shape = sample(1, f, seed).to_shape()
    spec = return_probabilities(shape, f + 3)
    assert reconstruct_e1(spec, f) == shape


# -- half shapes and scales

def test_half_shape_examples():
    pair = gamma_branches(ONE_TWO, order=1)
    # kappa_1 = 0, so nu_1 vanishes
    assert abs(half_shape_from_series(pair.gamma_plus, PLUS, 2).coeffs[0]) < mpmath.mpf(2) ** -240
    assert half_shape_from_series(pair.gamma_minus, MINUS, 1).coeffs == ()
    simple = gamma_branches(simple_walk(), order=1)
    assert half_shape_from_series(simple.gamma_plus, PLUS, 1).coeffs == ()


def test_half_shape_scale_invariant():
    # nu_1 = kappa_1 kappa_2^{-1/2} is the same for chi(t) and chi(lambda t)
    s = new_shape({-1: F(1, 2), 1: F(1, 4), 2: F(1, 4)})
    pair = gamma_branches(s, order=1)
    nu = half_shape_from_series(pair.gamma_plus, PLUS, 2).coeffs[0]
    with mpmath.workprec(PREC):
        assert abs(nu - mpmath.mpf(1) / 4 / mpmath.sqrt(mpmath.mpf(1) / 4)) < mpmath.mpf(2) ** (20 - PREC)


def test_half_shape_missing_orders():
    # known only through u^(-5/4); the plus side needs u^(-3/2)
    d = make_series([F(3, 2)], 1, 2, F(5, 4), INFINITY)
    with pytest.raises(MissingOrders):
        reconstruct_from_diff(d, 1, 2, 0)


def classes(shape):
    pair = gamma_branches(shape, order=1)
    return (half_shape_from_series(pair.gamma_plus, PLUS, shape.f),
            half_shape_from_series(pair.gamma_minus, MINUS, shape.e))


def test_fix_scales_examples():
    tol = F(1, 2 ** (PREC - 16))
    assert max_coefficient_distance(fix_scales(*classes(simple_walk()), 0), simple_walk()) <= tol
    assert max_coefficient_distance(fix_scales(*classes(lazy_walk()), F(1, 2)), lazy_walk()) <= tol
    with pytest.raises(NoSolution):
        fix_scales(*classes(simple_walk()), 1)


@settings(max_examples=15)
@given(unbiased_shapes(max_degree=5), st.fractions(0, F(9, 10), max_denominator=10))
def test_fix_scales_mass_and_mean(s, k0):
    out = fix_scales(*classes(s), k0)
    tol = F(1, 2 ** (PREC - 16))
    assert abs(out.mass - 1) <= tol and abs(out.mean) <= tol
    assert out[0] == k0 or abs(out[0] - k0) <= tol


def test_project_to_affine():
    got = project_to_affine({-1: F(1, 2) + F(1, 1000), 1: F(1, 2)}, 1, 1)
    assert sum(got.values()) == 1 and sum(k * c for k, c in got.items()) == 0


# -- full roundtrips

def test_branches_roundtrip_examples():
    out = reconstruct_from_branches(gamma_branches(ONE_TWO, order=6), 0)
    assert max_coefficient_distance(out, ONE_TWO) < F(1, 10 ** 60)
    out = reconstruct_from_branches(gamma_branches(simple_walk(), order=2), 0)
    assert max_coefficient_distance(out, simple_walk()) < F(1, 10 ** 60)


@settings(max_examples=15)
@given(unbiased_shapes(max_degree=6))
def test_branches_roundtrip_any_gcd(s):
    out = reconstruct_from_branches(gamma_branches(s, order=1), s[0])
    assert max_coefficient_distance(out, s) <= F(1, 2 ** (PREC // 2))


@st.composite
def coprime_shapes(draw):
    e = draw(st.integers(1, 4))
    f = draw(st.integers(e + 1, 5).filter(lambda f: math.gcd(e, f) == 1))
    return sample(e, f, draw(st.integers(0, 2 ** 32 - 1))).to_shape()


@settings(max_examples=15)
@given(coprime_shapes())
def test_diff_roundtrip_coprime(s):
    out = reconstruct_from_diff(gamma_diff_at_infinity(s, order=1), s.e, s.f, s[0])
    assert max_coefficient_distance(out, s) <= F(1, 2 ** (PREC // 2))


def test_diff_roundtrip_example():
    out = reconstruct_from_diff(gamma_diff_at_infinity(ONE_TWO, order=2), 1, 2, 0)
    assert max_coefficient_distance(out, ONE_TWO) < F(1, 10 ** 60)


def test_diff_refusals():
    x24 = new_shape({-2: F(1, 3), -1: F(1, 4), 1: F(1, 4), 4: F(1, 6)})
    assert x24.mean == 0
    with pytest.raises(AmbiguousLattice):
        reconstruct_from_diff(gamma_diff_at_infinity(x24, order=1), 2, 4, 0)
    x22 = new_shape({-2: F(1, 4), -1: F(1, 4), 1: F(1, 4), 2: F(1, 4)})
    with pytest.raises(DegreesEqual):
        reconstruct_from_diff(gamma_diff_at_infinity(x22, order=1), 2, 2, 0)


# -- guarantee classifier

def test_guarantee_examples():
    r = guarantee(2, 3)
    assert r.verdict == CLEAN and any("general statement" in n for n in r.notes)
    r = guarantee(5, 5)
    assert r.verdict == EXCEPTIONAL
    assert any(row.table == "sporadic" and row.label == "(b)" and row.e_options == "5" and row.inverse_sum == "2/5"
               for row, _ in r.table_rows)
    r = guarantee(2, 2)
    assert r.verdict == EXCEPTIONAL
    assert any(row.group == "F_2^2 : GL_2(2)" and row.inverse_sum == "1" for row, _ in r.table_rows)
    assert guarantee(2, 4).verdict == MAIN


def test_guarantee_exhaustive():
    for e in range(1, 101):
        for f in range(1, 101):
            r = guarantee(e, f)
            n = e + f
            exceptional = n == 10 or math.isqrt(n) ** 2 == n
            assert (r.verdict == CLEAN) == (math.gcd(e, f) == 1)
            assert (r.verdict == EXCEPTIONAL) == (exceptional and math.gcd(e, f) > 1)
            if r.verdict not in (CLEAN, EXCEPTIONAL):
                assert r.verdict == MAIN
            if r.verdict == EXCEPTIONAL and n in (4, 9, 10, 16, 25):
                assert r.table_rows


def test_guarantee_for_shape_non_primitive():
    s = new_shape({-2: F(1, 2), 2: F(1, 2)})
    assert guarantee_for_shape(s).verdict == GENERIC
    assert guarantee_for_shape(ONE_TWO).verdict == CLEAN


def test_guarantee_json():
    js = guarantee(5, 5).to_json()
    assert js["schema"] == "walkspec.guarantee/1" and js["verdict"] == "Exceptional"
    assert all("parameters" in row for row in js["table_rows"])
