"""Tests for coefficient asymptotics of 1/((1-w v1)(1-w v2)).

The exact-coefficient oracle is validated against closed forms and an
independent direct-product route; the saddle and boundary predictions
are then measured against the oracle.
"""

import math

import numpy as np
import pytest

from asympint.errors import BoundaryRegimeError
from asympint.expansion import find_critical_points
from asympint.genfun import (
    CoefficientTable,
    GenFunProblem,
    _check_series_radius,
    _direct_corner,
    boundary_limit,
    derivative_rates,
    exact_coefficients,
    face_scaling_u,
    phase_domain,
    phase_expression,
    saddle_prediction,
)
from asympint.parser import parse

Z = ("z",)


def _problem(v2_text, kappa):
    return GenFunProblem(
        parse("z", 1, Z), parse(v2_text, 1, Z), kappa
    )


def _phi_cdf(u):
    return 0.5 * math.erfc(-u / math.sqrt(2.0))


def test_problem_validation():
    with pytest.raises(ValueError):
        _problem("2*z", 1.25)            # v2(1) = 2
    with pytest.raises(ValueError):
        _problem("2 - z", 1.25)          # v2'(1) = -1
    with pytest.raises(ValueError):
        GenFunProblem(parse("z", 1, Z), parse("z", 1, Z), -1.0)
    p = _problem("(1+z^3)/2", 1.25)
    assert derivative_rates(p) == (1.0, 1.5)


def test_exact_coefficients_identical_branches():
    # v1 = v2 = z: F = 1/(1-wz)^2, a_rs = (s+1) on the diagonal
    p = GenFunProblem(parse("z", 1, Z), parse("z", 1, Z), 1.0)
    tab = exact_coefficients(p, 12, 10)
    for s in range(11):
        assert abs(tab.a[s, s] - (s + 1)) < 1e-12
    assert tab.a[2, 5] == 0 and tab.a[7, 5] == 0


def test_exact_coefficients_geometric_pair():
    # v1 = z, v2 = 1: a_rs = 1 exactly when r <= s
    p = _problem("1", 1.0)
    tab = exact_coefficients(p, 8, 8)
    for r in range(9):
        for s in range(9):
            assert abs(tab.a[r, s] - (1.0 if r <= s else 0.0)) < 1e-12


def test_exact_coefficients_spot_value():
    p = _problem("(1+z^3)/2", 1.25)
    tab = exact_coefficients(p, 60, 30)
    assert abs(tab.a[38, 30].real - 1.414034109563) < 1e-9
    assert abs(tab.a[38, 30].imag) < 1e-12
    assert abs(tab.a[0, 1] - 0.5) < 1e-15
    assert abs(tab.a[1, 1] - 1.0) < 1e-15
    assert abs(tab.a[3, 1] - 0.5) < 1e-15


def test_corner_routes_agree():
    p = _problem("(1+z^3)/2", 1.25)
    tab = exact_coefficients(p, 30, 20)
    v1c = np.zeros(31, complex)
    v1c[1] = 1.0
    v2c = np.zeros(31, complex)
    v2c[0] = 0.5
    v2c[3] = 0.5
    corner = _direct_corner(v1c, v2c, 9, 9)
    assert np.max(np.abs(tab.values[:10, :10] - corner)) < 1e-12


def test_table_bounds_and_cap():
    p = _problem("(1+z^3)/2", 1.25)
    tab = exact_coefficients(p, 5, 5)
    assert tab.max_r == 5 and tab.max_s == 5
    with pytest.raises(KeyError):
        tab.a[6, 0]
    assert tab.a.get((6, 0)) == 0j
    with pytest.raises(ValueError):
        exact_coefficients(p, 2000, 2000)
    with pytest.raises(ValueError):
        exact_coefficients(p, -1, 5)


def test_radius_heuristic():
    with pytest.raises(ValueError):
        _check_series_radius(np.array([1.3 ** k for k in range(40)]), "v")
    _check_series_radius(np.array([0.8 ** k for k in range(40)]), "v")
    _check_series_radius(np.zeros(40), "v")
    # reachable from the public API: pole at z = 0.8 with v(1) = 1 and
    # v'(1) = 3
    bad = _problem("z - 0.5*(z^2-z)/(1-1.25*z)", 1.5)
    with pytest.raises(ValueError, match="radius"):
        exact_coefficients(bad, 40, 10)


def test_phase_stationary_point_location():
    # at kappa = 1.25 the stationary point is (p, t) = (1/2, 0)
    p = _problem("(1+z^3)/2", 1.25)
    reports = find_critical_points(phase_expression(p), phase_domain())
    assert len(reports) == 1
    r = reports[0]
    assert abs(r.location[0] - 0.5) < 1e-9
    assert abs(r.location[1]) < 1e-9
    assert not r.boundary_half
    # the Hessian has a vanishing p-p entry, forcing the pre-rotation
    assert abs(r.hessian.matrix[0, 0]) < 1e-10
    assert abs(r.hessian.matrix[0, 1] + 0.5j) < 1e-9


def test_saddle_prediction_values():
    assert abs(saddle_prediction(_problem("(1+z^3)/2", 1.25)) - 2.0) < 1e-12
    assert abs(saddle_prediction(_problem("z^2", 1.5)) - 1.0) < 1e-12


def test_saddle_prediction_matches_oracle_for_z2_pair():
    # v1 = z, v2 = z^2: exactly one composition per (r, s) with
    # s <= r <= 2s, so a_rs = 1 and the limit is attained exactly
    p = _problem("z^2", 1.5)
    tab = exact_coefficients(p, 160, 100)
    pred = saddle_prediction(p)
    for s in (40, 100):
        r = round(1.5 * s)
        assert abs(tab.a[r, s].real - pred) < 1e-12


def test_saddle_prediction_boundary_signal():
    with pytest.raises(BoundaryRegimeError):
        saddle_prediction(_problem("(1+z^3)/2", 1.0))
    with pytest.raises(BoundaryRegimeError):
        saddle_prediction(_problem("(1+z^3)/2", 1.5))
    with pytest.raises(BoundaryRegimeError):
        saddle_prediction(_problem("(1+z^3)/2", 0.7))
    with pytest.raises(ValueError):
        saddle_prediction(GenFunProblem(parse("z", 1, Z), parse("z", 1, Z), 1.0))


def test_central_agreement_interior():
    # kappa = 1.1: the measured deviations |a_rs |Delta| - 1| at
    # r = round(kappa s)
    p = _problem("(1+z^3)/2", 1.1)
    tab = exact_coefficients(p, 120, 100)
    dev50 = abs(tab.a[55, 50].real * 0.5 - 1.0)
    dev100 = abs(tab.a[110, 100].real * 0.5 - 1.0)
    assert abs(dev50 - 0.064990) < 2e-3
    assert abs(dev100 - 0.005179) < 1e-3
    assert dev100 < dev50 / 4


def test_boundary_limit_values():
    p = _problem("(1+z^3)/2", 1.25)
    assert abs(boundary_limit(p, 0.0) - 1.0) < 1e-12
    assert abs(boundary_limit(p, 8.0) - 2.0) < 1e-9
    assert boundary_limit(p, -8.0) < 1e-9
    with pytest.raises(ValueError):
        boundary_limit(GenFunProblem(parse("z", 1, Z), parse("z", 1, Z), 1.0), 0.0)


def test_face_scaling_u():
    p = _problem("(1+z^3)/2", 1.25)
    # v2: v'' = 3, rate 3/2, sigma^2 = 3 + 1.5 - 2.25 = 2.25
    s = 400
    u = face_scaling_u(p, 2, round(1.5 * s - 1.5 * math.sqrt(s)), s)
    assert abs(u - 1.0) < 1e-9
    assert face_scaling_u(p, 2, round(1.5 * s), s) <= 0.0 + 1e-9
    # v1 = z is deterministic: no Gaussian profile at that face
    with pytest.raises(ValueError, match="variance"):
        face_scaling_u(p, 1, s, s)
    with pytest.raises(ValueError):
        face_scaling_u(p, 3, s, s)


def test_gaussian_profile_at_stochastic_face():
    # a_rs |Delta| tracks Phi(u) along r = 1.5 s - 1.5 sqrt(s) w
    p = _problem("(1+z^3)/2", 1.25)
    tab = exact_coefficients(p, 660, 400)
    s = 400
    for w in (0.0, 0.5, 1.0, 2.0):
        r = round(1.5 * s - 1.5 * math.sqrt(s) * w)
        u = face_scaling_u(p, 2, r, s)
        ratio = tab.a[r, s].real * 0.5
        assert abs(ratio - _phi_cdf(u)) < 0.03
    # the plain face ratio approaches 1/2
    assert abs(tab.a[300, 200].real * 0.5 - 0.5) < 0.05


def test_deterministic_face_has_renewal_constant_not_half():
    # at the v1 = z face the whole p-edge is stationary and the ratio
    # converges to (1 + 3/sqrt(5))/2, not 1/2
    p = _problem("(1+z^3)/2", 1.25)
    tab = exact_coefficients(p, 220, 200)
    target = 0.5 * (1.0 + 3.0 / math.sqrt(5.0))
    assert abs(tab.a[200, 200].real * 0.5 - target) < 1e-4
