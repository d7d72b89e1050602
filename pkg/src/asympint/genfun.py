"""Coefficient asymptotics for F(z, w) = 1/((1 - w v1(z))(1 - w v2(z))).

The Maclaurin coefficients a_rs of F along a direction r ~ kappa s are
governed by a two-variable saddle point integral: summing the geometric
series in w and writing the j-sum as an integral over a mixing weight p
gives

    a_rs = (s + 1)/(2 pi) * int_0^1 int_-pi^pi e^{-s phi(p, t)} dt dp,
    phi(p, t) = i kappa t - log[(1 - p) v1(e^{it}) + p v2(e^{it})]

so that for kappa strictly between the rates v1'(1) and v2'(1) the
stationary point is interior and a_rs -> 1/|v1'(1) - v2'(1)|, while at
kappa equal to one of the rates the stationary point sits on the p-face
and a Gaussian boundary profile appears.

The exact-coefficient oracle is plain truncated series arithmetic on F
(recurrence T_s = v1 T_{s-1} + v2^s), deliberately independent of the
saddle point machinery it is used to test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BoundaryRegimeError
from .expansion import Domain, expand_at, find_critical_points
from .parser import (
    Call,
    Const,
    ExpansionPoint,
    Mul,
    Sub,
    Var,
    diff_expr,
    eval_expr,
    substitute,
    taylor,
)

__all__ = [
    "GenFunProblem",
    "CoefficientTable",
    "exact_coefficients",
    "saddle_prediction",
    "boundary_limit",
    "face_scaling_u",
    "derivative_rates",
    "phase_expression",
]

_T_WINDOW = 0.5


def _value_and_rate(v, label):
    val = eval_expr(v, (1.0,))
    if abs(val - 1.0) > 1e-12:
        raise ValueError(f"{label}(1) = {val:.6g}, must equal 1")
    rate = eval_expr(diff_expr(v, 0), (1.0,))
    if abs(rate.imag) > 1e-12 or rate.real < -1e-12:
        raise ValueError(
            f"{label}'(1) = {rate:.6g}, must be non-negative real"
        )
    return float(rate.real)


@dataclass(frozen=True)
class GenFunProblem:
    """Two branch generating functions and a coefficient direction.

    v1 and v2 are parsed one-variable expressions with v_i(1) = 1 and
    non-negative real derivative at 1; kappa is the direction r/s;
    series_order is a default z-truncation hint for the exact oracle.
    The requirement that the two rates differ is checked where it
    matters (the saddle prediction), so degenerate pairs can still be
    used with the exact-coefficient oracle.
    """

    v1: object
    v2: object
    kappa: float
    series_order: int = 0

    def __post_init__(self):
        _value_and_rate(self.v1, "v1")
        _value_and_rate(self.v2, "v2")
        if not float(self.kappa) > 0:
            raise ValueError("kappa must be positive")


def derivative_rates(problem):
    """(v1'(1), v2'(1)) as real numbers."""
    return (
        _value_and_rate(problem.v1, "v1"),
        _value_and_rate(problem.v2, "v2"),
    )


class _TableView:
    """Read-only (r, s) -> coefficient mapping over the dense table."""

    __slots__ = ("_values",)

    def __init__(self, values):
        self._values = values

    def __getitem__(self, rs):
        r, s = rs
        if not (0 <= r < self._values.shape[0]
                and 0 <= s < self._values.shape[1]):
            raise KeyError(rs)
        return complex(self._values[r, s])

    def get(self, rs, default=0j):
        try:
            return self[rs]
        except KeyError:
            return default


@dataclass(frozen=True)
class CoefficientTable:
    """Dense Maclaurin coefficients values[r, s] of F for r <= R, s <= S."""

    values: np.ndarray

    @property
    def a(self):
        return _TableView(self.values)

    @property
    def max_r(self):
        return self.values.shape[0] - 1

    @property
    def max_s(self):
        return self.values.shape[1] - 1


def _maclaurin_array(v, order):
    s = taylor(v, ExpansionPoint((0.0,), order), dim=1)
    return np.array([s.coefficient((k,)) for k in range(order + 1)])


def _check_series_radius(coeffs, label):
    n = len(coeffs) - 1
    worst = 0.0
    for k in range(max(4, n // 2), n + 1):
        m = abs(coeffs[k])
        if m > 1e-300:
            worst = max(worst, m ** (1.0 / k))
    if worst > 1.0 + 1e-9:
        raise ValueError(
            f"{label} Maclaurin coefficients grow like {worst:.4g}^k: "
            "radius of convergence appears to be below 1"
        )


def _direct_corner(v1c, v2c, nr, ns):
    # independent route: full product of the two geometric factors,
    # [w^s] F = sum_j v1^j v2^{s-j}, with every power formed explicitly
    width = len(v1c)
    pow1 = [np.zeros(width, complex)]
    pow2 = [np.zeros(width, complex)]
    pow1[0][0] = 1.0
    pow2[0][0] = 1.0
    for _ in range(ns):
        pow1.append(np.convolve(pow1[-1], v1c)[:width])
        pow2.append(np.convolve(pow2[-1], v2c)[:width])
    corner = np.zeros((nr + 1, ns + 1), complex)
    for s in range(ns + 1):
        col = np.zeros(width, complex)
        for j in range(s + 1):
            col += np.convolve(pow1[j], pow2[s - j])[:width]
        corner[:, s] = col[: nr + 1]
    return corner


def exact_coefficients(problem, R, S):
    """CoefficientTable of a_rs for 0 <= r <= R, 0 <= s <= S.

    Built by the column recurrence T_s = v1 T_{s-1} + v2^s on truncated
    Maclaurin arrays; a 10 x 10 corner is re-derived by direct series
    multiplication of the two geometric factors and must agree, and the
    v_i coefficient tails are screened for sub-unit convergence radius.
    """
    R, S = int(R), int(S)
    if R < 0 or S < 0:
        raise ValueError("R and S must be non-negative")
    if R * S > 10 ** 6:
        raise ValueError("table request exceeds the R*S <= 10^6 cap")
    v1c = _maclaurin_array(problem.v1, R)
    v2c = _maclaurin_array(problem.v2, R)
    _check_series_radius(v1c, "v1")
    _check_series_radius(v2c, "v2")

    table = np.zeros((R + 1, S + 1), complex)
    t = np.zeros(R + 1, complex)
    t[0] = 1.0
    v2pow = np.zeros(R + 1, complex)
    v2pow[0] = 1.0
    table[:, 0] = t
    for s in range(1, S + 1):
        v2pow = np.convolve(v2pow, v2c)[: R + 1]
        t = np.convolve(t, v1c)[: R + 1] + v2pow
        table[:, s] = t

    nr, ns = min(R, 9), min(S, 9)
    corner = _direct_corner(v1c, v2c, nr, ns)
    scale = max(1.0, float(np.max(np.abs(corner))))
    if float(np.max(np.abs(table[: nr + 1, : ns + 1] - corner))) > 1e-12 * scale:
        raise RuntimeError(
            "internal: recurrence and direct-product coefficient routes "
            "disagree on the corner block"
        )
    return CoefficientTable(values=table)


def phase_expression(problem):
    """The two-variable phase i kappa t - log[(1-p) v1(e^{it}) + p v2(e^{it})].

    Variables are (p, t) = (Var 0, Var 1); built for the box
    [0, 1] x [-0.5, 0.5].
    """
    eit = Call("exp", Mul(Const(1j), Var(1)))
    v1t = substitute(problem.v1, {0: eit})
    v2t = substitute(problem.v2, {0: eit})
    mix = Sub(v1t, Mul(Var(0), Sub(v1t, v2t)))
    return Sub(
        Mul(Const(1j * float(problem.kappa)), Var(1)),
        Call("log", mix),
    )


def phase_domain():
    return Domain("box", ((0.0, 1.0), (-_T_WINDOW, _T_WINDOW)))


def saddle_prediction(problem):
    """1/|v1'(1) - v2'(1)|, cross-checked against the saddle pipeline.

    Requires kappa strictly between the two rates (interior stationary
    point).  The full pipeline is run on the phase over
    [0,1] x [-0.5, 0.5]: it must find the single stationary point at
    p* = (kappa - v1'(1))/(v2'(1) - v1'(1)), t = 0, and its leading
    coefficient must satisfy c_0 / (2 pi) = prediction to 1e-8.
    """
    d1, d2 = derivative_rates(problem)
    if abs(d1 - d2) <= 1e-12 * max(1.0, abs(d1), abs(d2)):
        raise ValueError(
            "v1'(1) = v2'(1): no direction interval, the saddle formula "
            "does not apply"
        )
    lo, hi = sorted((d1, d2))
    kappa = float(problem.kappa)
    if not (lo + 1e-12 < kappa < hi - 1e-12):
        raise BoundaryRegimeError(
            f"kappa = {kappa:.6g} is not strictly inside the rate interval "
            f"({lo:.6g}, {hi:.6g}): boundary regime, use boundary_limit"
        )
    prediction = 1.0 / abs(d1 - d2)

    phi = phase_expression(problem)
    dom = phase_domain()
    pstar = (kappa - d1) / (d2 - d1)
    reports = find_critical_points(phi, dom, seeds=[(pstar, 0.0)])
    if not reports:
        raise RuntimeError(
            "internal: no stationary point of the coefficient phase found"
        )
    best = min(
        reports,
        key=lambda r: abs(r.location[0] - pstar) + abs(r.location[1]),
    )
    if abs(best.location[0] - pstar) > 1e-8 or abs(best.location[1]) > 1e-8:
        raise RuntimeError(
            "internal: stationary point of the coefficient phase is not "
            "at (p*, 0)"
        )
    at = ExpansionPoint(best.location, 4)
    phi_s = taylor(phi, at, dim=2)
    one = taylor(Const(1.0 + 0j), at, dim=2)
    c0 = expand_at(phi_s, one, best, 2)[0]
    if abs(c0 / (2.0 * math.pi) - prediction) > 1e-8 * prediction:
        raise RuntimeError(
            "internal: saddle pipeline leading constant disagrees with "
            "the closed form 1/|v1'(1) - v2'(1)|"
        )
    return prediction


def boundary_limit(problem, u):
    """Phi(u)/|v1'(1) - v2'(1)| with Phi the standard normal CDF.

    The limit of a_rs along directions approaching one of the rates at
    the Gaussian scale; u = 0 reproduces half the interior constant
    (the stationary point sits on the p-face and the face contributes
    the boundary factor 1/2).
    """
    d1, d2 = derivative_rates(problem)
    if abs(d1 - d2) <= 1e-12 * max(1.0, abs(d1), abs(d2)):
        raise ValueError("v1'(1) = v2'(1): no direction interval")
    cdf = 0.5 * math.erfc(-float(u) / math.sqrt(2.0))
    return cdf / abs(d1 - d2)


def face_scaling_u(problem, face, r, s):
    """The Gaussian argument u for coefficient (r, s) near a face rate.

    face selects which branch rate r/s is approaching (1 or 2).  With
    kappa_f the face rate and sigma_f^2 = v''(1) + v'(1) - v'(1)^2 the
    per-step variance of that branch, the profile a_rs |Delta| ->
    Phi(u) holds along u = +-(r/s - kappa_f) sqrt(s) / sigma_f, signed
    so that u -> +inf points into the rate interval.  A vanishing
    sigma_f means the branch is deterministic and the profile is a step
    rather than a Gaussian; that case is rejected.
    """
    if face not in (1, 2):
        raise ValueError("face must be 1 or 2")
    v = problem.v1 if face == 1 else problem.v2
    other = problem.v2 if face == 1 else problem.v1
    rate = _value_and_rate(v, f"v{face}")
    other_rate = _value_and_rate(other, f"v{3 - face}")
    second = eval_expr(diff_expr(diff_expr(v, 0), 0), (1.0,))
    var = second.real + rate - rate * rate
    if var <= 1e-12:
        raise ValueError(
            f"v{face} has vanishing variance at 1 (sigma^2 = {var:.3g}): "
            "the coefficient profile at this face is a step, not a "
            "Gaussian; no finite u exists"
        )
    sigma = math.sqrt(var)
    u = (r / s - rate) * math.sqrt(s) / sigma
    if other_rate < rate:
        u = -u
    return u
