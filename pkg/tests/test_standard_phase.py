"""Tests for Gaussian moment constants and the standard-phase expansion."""

import math
from itertools import product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from asympint.multiseries import TruncatedSeries
from asympint.quadrature import decay_slope, integrate
from asympint.standard_phase import (
    beta,
    beta_half,
    gamma_half,
    half_monomial_integral_1d,
    monomial_integral_1d,
    standard_phase_expansion,
    standard_phase_halfspace_expansion,
)

SQRT_PI = math.sqrt(math.pi)


def test_gamma_half_small_values():
    assert gamma_half(1) == SQRT_PI
    assert gamma_half(2) == 1.0
    assert abs(gamma_half(3) - SQRT_PI / 2) < 1e-15
    assert gamma_half(4) == 1.0
    assert abs(gamma_half(5) - 0.75 * SQRT_PI) < 1e-15
    assert gamma_half(8) == 6.0
    with pytest.raises(ValueError):
        gamma_half(0)


@given(st.integers(min_value=1, max_value=40))
def test_gamma_half_matches_math_gamma(m):
    assert gamma_half(m) == pytest.approx(math.gamma(m / 2), rel=1e-13)


def test_monomial_integral_examples():
    assert monomial_integral_1d(1, 7.0) == 0.0
    assert abs(monomial_integral_1d(0, 1.0) - SQRT_PI) < 1e-15
    assert abs(monomial_integral_1d(2, 1.0) - SQRT_PI / 2) < 1e-15


def test_monomial_integral_against_quadrature():
    for n, lam in [(0, 1.0), (2, 1.0), (4, 3.0), (6, 2.0), (3, 2.0)]:
        res = integrate(
            lambda p: p[:, 0] ** 2, lambda p, n=n: p[:, 0] ** n,
            [(-10.0, 10.0)], lam=lam, tol=1e-13,
        )
        assert abs(res.value - monomial_integral_1d(n, lam)) < 1e-10


def test_half_monomial_integral_against_quadrature():
    for n, lam in [(0, 1.0), (1, 1.0), (2, 2.0), (3, 3.0)]:
        res = integrate(
            lambda p: p[:, 0] ** 2, lambda p, n=n: p[:, 0] ** n,
            [(0.0, 10.0)], lam=lam, tol=1e-13,
        )
        assert abs(res.value - half_monomial_integral_1d(n, lam)) < 1e-10
    # even degrees are half the full-line value, odd are not zero
    assert half_monomial_integral_1d(2, 1.0) == monomial_integral_1d(2, 1.0) / 2
    assert half_monomial_integral_1d(1, 1.0) == 0.5


def test_beta_examples():
    assert beta((1, 0)) == 0.0
    assert abs(beta((0, 0)) - math.pi) < 1e-15
    assert abs(beta((2, 0)) - math.pi / 2) < 1e-15
    assert abs(beta(()) - 1.0) < 1e-15


@given(st.lists(st.integers(min_value=0, max_value=8), min_size=1, max_size=3))
def test_beta_matches_factorial_form(r):
    # pi^{d/2} prod r_j! / ((r_j/2)! 2^{r_j}) for all-even r
    if any(rj % 2 for rj in r):
        assert beta(r) == 0.0
    else:
        d = len(r)
        expected = math.pi ** (d / 2)
        for rj in r:
            expected *= math.factorial(rj) / (
                math.factorial(rj // 2) * 2 ** rj
            )
        assert beta(r) == pytest.approx(expected, rel=1e-13)


def test_beta_half_relations():
    assert beta_half((0,), 0) == 0.5 * SQRT_PI
    assert beta_half((1,), 0) == 0.5
    assert beta_half((2, 1), 0) == 0.0
    assert beta_half((1, 2), 0) == pytest.approx(0.5 * 1.0 * SQRT_PI / 2)
    with pytest.raises(ValueError):
        beta_half((1, 2), 5)


def _series_from(coeffs, dim, order):
    s = TruncatedSeries.zero(dim, order)
    for key, val in coeffs.items():
        s = s + TruncatedSeries(dim, order, {key: val})
    return s


def test_expansion_examples():
    one = TruncatedSeries.constant(1, 4, 1.0)
    c = standard_phase_expansion(one, 4)
    assert abs(c[0] - SQRT_PI) < 1e-15
    assert all(abs(v) == 0.0 for v in c[1:])

    x = TruncatedSeries.variable(1, 4, 0)
    assert all(abs(v) == 0.0 for v in standard_phase_expansion(x, 4))

    a = _series_from({(0,): 1.0, (2,): 1.0}, 1, 4)
    c = standard_phase_expansion(a, 4)
    assert abs(c[0] - SQRT_PI) < 1e-15
    assert abs(c[2] - SQRT_PI / 2) < 1e-15
    assert c[1] == 0 and c[3] == 0 and c[4] == 0


def test_expansion_rejects_low_truncation():
    a = TruncatedSeries.constant(1, 2, 1.0)
    with pytest.raises(ValueError):
        standard_phase_expansion(a, 3)


def test_halfspace_expansion_even_terms_halve():
    a = _series_from({(0,): 2.0, (1,): 0.5, (2,): -1.0}, 1, 3)
    full = standard_phase_expansion(a, 3)
    half = standard_phase_halfspace_expansion(a, 3, 0)
    assert half[0] == pytest.approx(full[0] / 2)
    assert half[2] == pytest.approx(full[2] / 2)
    # the odd term comes from the x coefficient: 0.5 * (1/2) Gamma(1)
    assert half[1] == pytest.approx(0.25)


def _quad_value(coeffs, dim, lam):
    def amp(points):
        out = np.zeros(points.shape[0], dtype=complex)
        for key, val in coeffs.items():
            term = np.full(points.shape[0], complex(val))
            for axis, e in enumerate(key):
                if e:
                    term = term * points[:, axis] ** e
            out += term
        return out

    phi = lambda p: np.sum(p * p, axis=1)
    return integrate(phi, amp, [(-10.0, 10.0)] * dim, lam=lam, tol=1e-13)


def test_polynomial_amplitudes_match_quadrature():
    # degree <= 6 in d <= 2 at lam in {5, 10, 20}, relative 1e-8
    cases = [
        (1, {(0,): 1.0, (2,): -0.7, (4,): 0.3, (6,): 0.11}),
        (1, {(1,): 1.0, (3,): 0.5, (5,): -0.25, (0,): 2.0}),
        (2, {(0, 0): 1.0, (2, 0): 0.4, (0, 4): -0.2, (2, 2): 0.15,
             (3, 3): 0.1, (6, 0): 0.05}),
        (2, {(1, 1): 1.0, (0, 0): 0.3, (4, 2): -0.08}),
    ]
    for dim, coeffs in cases:
        order = max(sum(k) for k in coeffs)
        a = _series_from(coeffs, dim, order)
        c = standard_phase_expansion(a, order)
        for lam in (5.0, 10.0, 20.0):
            predicted = sum(
                cn * lam ** (-(dim + n) / 2) for n, cn in enumerate(c)
            )
            res = _quad_value(coeffs, dim, lam)
            assert abs(res.value - predicted) <= 1e-8 * max(1e-30, abs(res.value)) + 5e-13


def test_remainder_slope_law():
    # A = x^{2m} g with bounded g: dropping terms below 2m leaves an error
    # of order lam^{-(d+2m)/2}
    for m, slope_target in [(1, -1.5), (2, -2.5)]:
        coeffs = {(2 * m,): 1.0, (2 * m + 2,): 0.2}
        lams = [20.0, 40.0, 80.0, 160.0]
        errs = []
        for lam in lams:
            res = _quad_value(coeffs, 1, lam)
            # partial sum through n < 2m is identically zero here
            errs.append((lam, abs(res.value)))
        fitted = decay_slope(errs)
        assert abs(fitted - slope_target) <= 0.1
