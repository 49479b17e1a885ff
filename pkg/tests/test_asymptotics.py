from fractions import Fraction as F

import mpmath
import pytest
from hypothesis import given, strategies as st

from walkspec import (Biased, OrderTooLarge, TailNotConverged, evaluate_L, evaluate_L_tilde, expansion,
                      lazy_walk, moments, new_shape, simple_walk, symbolic_A, verify_expansion)
from walkspec._numeric import to_mpf
from walkspec.asymptotics import ALTERNATING, alternative_prefactor, fit_coefficients, prefactor

from conftest import unbiased_shapes

ONE_TWO = new_shape({-1: F(2, 3), 2: F(1, 3)})


def rho(shape, m):
    J = moments(shape, m)
    return {n: to_mpf(J[n]) / to_mpf(J[2]) ** (mpmath.mpf(n) / 2) for n in range(3, m + 1)}


def test_A0_and_simple_lazy():
    assert [str(p) for p in symbolic_A(0)] == ["1"]
    A = symbolic_A(1)
    assert A[1].evaluate({3: 0, 4: 1}) == F(1, 8)
    assert A[1].evaluate({3: 0, 4: 2}) == F(1, 4)


def test_bessel_coefficients_through_three():
    # e^{-s} I_0(s) ~ (2 pi s)^{-1/2} sum ((2l-1)!!)^2 / (8^l l!) s^{-l}
    assert expansion(simple_walk(), 3).coefficients == (1, F(1, 8), F(9, 128), F(75, 1024))
    assert expansion(lazy_walk(), 3).coefficients == (1, F(1, 4), F(9, 32), F(75, 128))


def test_alternating_mode():
    plain = expansion(ONE_TWO, 4).coefficients
    alt = expansion(ONE_TWO, 4, ALTERNATING).coefficients
    assert alt == tuple((-1) ** l * a for l, a in enumerate(plain))


def test_order_guard():
    with pytest.raises(OrderTooLarge):
        symbolic_A(13)


@pytest.mark.parametrize("m", range(0, 6))
def test_weight_grading_and_variables(m):
    for l, p in enumerate(symbolic_A(m)):
        assert p.weights() <= {2 * l}
        assert all(n <= 2 * l + 2 for n in p.variables())


def test_symmetric_shapes_need_only_even_rho():
    for l, p in enumerate(symbolic_A(5)):
        even = {mono: c for mono, c in p.terms if all(n % 2 == 0 for n, _ in mono)}
        # dropping odd rho leaves a polynomial in even rho of the same weight
        assert all(sum((n - 2) * k for n, k in mono) == 2 * l for mono in even)


@given(unbiased_shapes(max_degree=5))
def test_exact_evaluation_matches_normalized(s):
    r = rho(s, 8)
    for poly, exact in zip(symbolic_A(3), expansion(s, 3).coefficients):
        assert abs(to_mpf(poly.evaluate(r)) - to_mpf(exact)) < mpmath.mpf(10) ** -12


def test_prefactors():
    with mpmath.workprec(200):
        assert abs(prefactor(lazy_walk()) - 1 / mpmath.sqrt(mpmath.pi)) < mpmath.mpf(2) ** -190
        assert abs(alternative_prefactor(lazy_walk()) - 1 / (2 * mpmath.sqrt(mpmath.pi))) < mpmath.mpf(2) ** -190


@pytest.mark.parametrize("s", [F(1, 10), 10, 100, 10000])
def test_evaluate_L_against_bessel(s):
    with mpmath.workprec(300):
        sm = mpmath.mpf(s.numerator) / s.denominator if isinstance(s, F) else mpmath.mpf(s)
        assert abs(evaluate_L(simple_walk(), s) / (mpmath.exp(-sm) * mpmath.besseli(0, sm)) - 1) < mpmath.mpf(2) ** -240
        assert abs(evaluate_L(lazy_walk(), s) / (mpmath.exp(-sm / 2) * mpmath.besseli(0, sm / 2)) - 1) < mpmath.mpf(2) ** -240


def test_evaluate_L_spectrum_sum_route():
    with mpmath.workprec(300):
        v = evaluate_L(ONE_TWO, 10, n_terms=300)
        assert abs(v / evaluate_L(ONE_TWO, 10) - 1) < mpmath.mpf(2) ** -240
    with pytest.raises(TailNotConverged):
        evaluate_L(ONE_TWO, 100, n_terms=50)


def test_evaluate_L_near_zero():
    assert abs(evaluate_L(ONE_TWO, F(1, 10 ** 30)) - 1) < mpmath.mpf(10) ** -29


def test_evaluate_L_partial_sums_monotone():
    vals = [evaluate_L(ONE_TWO, 3, n_terms=n, precision=64) for n in (200, 220, 240)]
    assert vals[0] <= vals[1] <= vals[2]


@pytest.mark.parametrize("shape, scale", [(simple_walk(), 1), (lazy_walk(), F(1, 2))])
def test_evaluate_L_tilde_against_K0(shape, scale):
    with mpmath.workprec(300):
        x = mpmath.mpf(10) * mpmath.mpf(scale.numerator if isinstance(scale, F) else scale) / (scale.denominator if isinstance(scale, F) else 1)
        want = mpmath.exp(x) * mpmath.besselk(0, x) / mpmath.pi
        assert abs(evaluate_L_tilde(shape, 10) / want - 1) < mpmath.mpf(2) ** -200


def test_evaluate_L_tilde_large_s_matches_expansion():
    s = 10 ** 4
    exp_ = expansion(simple_walk(), 2, ALTERNATING)
    with mpmath.workprec(200):
        assert abs(evaluate_L_tilde(simple_walk(), s, precision=128) - exp_.partial_sum(s)) < 10 * mpmath.mpf(s) ** -3.5


def test_evaluate_L_tilde_needs_unbiased():
    with pytest.raises(Biased):
        evaluate_L_tilde(new_shape({-1: F(3, 7), 2: F(4, 7)}), 10)


GRID = [100, 1000, 10000]


def test_verify_simple():
    r = verify_expansion(simple_walk(), 1, GRID)
    assert r.passed
    assert abs(r.fitted_prefactor - 1 / mpmath.sqrt(2 * mpmath.pi)) < 1e-8
    assert abs(r.fitted_A.values[1] - 0.125) < 1e-6


def test_verify_lazy_resolves_prefactor():
    r = verify_expansion(lazy_walk(), 1, GRID)
    assert r.passed
    assert r.selected_prefactor == "(2 pi J_2)^(-1/2)"
    assert abs(r.fitted_prefactor * mpmath.sqrt(mpmath.pi) - 1) < 1e-8
    assert r.prefactor_deviation["sqrt(J_2 / (2 pi))"] > 0.5


def test_verify_one_two_order_zero():
    r = verify_expansion(ONE_TWO, 0, GRID)
    assert r.passed
    assert abs(r.fitted_prefactor - 1 / mpmath.sqrt(4 * mpmath.pi)) < 1e-8


def test_verify_grid_validation():
    with pytest.raises(ValueError):
        verify_expansion(simple_walk(), 1, [10, 100])
    with pytest.raises(ValueError):
        verify_expansion(simple_walk(), 1, [100, 10, 1000])


@pytest.mark.parametrize("shape", [lazy_walk(), ONE_TWO])
def test_sign_flip_of_fitted_coefficients(shape):
    grid = [200, 400, 800, 1600, 3200]
    plain = verify_expansion(shape, 2, grid, precision=160)
    tilde = verify_expansion(shape, 2, grid, precision=160, tilde=True)
    for l in range(3):
        a, b = plain.fitted_A.values[l], tilde.fitted_A.values[l]
        err = plain.fitted_A.errors[l] + tilde.fitted_A.errors[l]
        assert abs(b - (-1) ** l * a) <= err + mpmath.mpf(10) ** -30


@mpmath.workprec(256)
def test_fit_recovers_synthetic_series():
    P = mpmath.mpf(1) / 3
    coeffs = [1, mpmath.mpf(1) / 5, -mpmath.mpf(2) / 7]
    s = [mpmath.mpf(x) for x in (50, 100, 200, 400, 800, 1600)]
    L = [P * sum(c * x ** (-l) for l, c in enumerate(coeffs)) / mpmath.sqrt(x) for x in s]
    fit = fit_coefficients(s, L, P)
    assert abs(fit.values[1] - coeffs[1]) < 1e-20 and fit.values[0] == 1
    assert abs(fit.values[2] - coeffs[2]) < 1e-18
