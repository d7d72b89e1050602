"""Asymptotic expansion of exponential integrals over boxes.

Pipeline: locate stationary points of the phase by Newton iteration on
the exact gradient, re-centre phase and amplitude as truncated series,
flatten the phase to a sum of squares, push the amplitude forward
through the change of variables, and read the coefficients off the
standard-phase monomial integrals.  The result approximates

    I(lam) = int_M exp(-lam phi(x)) A(x) dx
           ~ sum_p exp(-lam phi(x_p)) sum_l c_l(x_p) lam^(-(d+l)/2)

where the per-point prefactors exp(-lam phi(x_p)) are unit modulus
whenever Re phi(x_p) = 0.  They are kept separate from the c_l so that
multi-point interference evaluates correctly at every lam.

Supported stationary points are interior points of a box and points on
the interior of a single face (declare the domain halfspace_box); the
face contributes an overall factor 1/2 at leading order and genuinely
new odd-order terms beyond it.  Corners are rejected.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateHessianError,
    DomainError,
    NoStationaryPointError,
    SingularPointError,
)
from .hessian import HessianData, hessian_of_matrix
from .morse import complete_squares, one_d_psi_derivatives
from .multiseries import TruncatedSeries, _promote, compose
from .parser import ExpansionPoint, diff_expr, eval_expr, taylor
from .standard_phase import (
    standard_phase_expansion,
    standard_phase_halfspace_expansion,
)

__all__ = [
    "Domain",
    "CriticalPointReport",
    "Expansion",
    "find_critical_points",
    "expand_at",
    "assemble",
    "evaluate_partial_sum",
    "expand_integral",
    "higher_order_1d_closed_form",
]

_GRID_POINTS_PER_AXIS = 9
_NEWTON_TOL = 1e-12
_NEWTON_MAX_ITER = 60
_DEDUPE_TOL = 1e-8
_IMAG_TOL = 1e-8
_FACE_SNAP_TOL = 1e-9
_RE_PHI_TOL = 1e-12


@dataclass(frozen=True)
class Domain:
    """Integration region: a real box, one interval per axis.

    kind is "box" for stationary points in the interior, or
    "halfspace_box" when a stationary point sits on the interior of one
    face (the face through the point is treated as a flat boundary).
    """

    kind: str
    bounds: tuple

    def __post_init__(self):
        if self.kind not in ("box", "halfspace_box"):
            raise ValueError("kind must be 'box' or 'halfspace_box'")
        bounds = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
        for lo, hi in bounds:
            if not lo < hi:
                raise ValueError("each axis needs lo < hi")
        object.__setattr__(self, "bounds", bounds)

    @property
    def dim(self):
        return len(self.bounds)


@dataclass(frozen=True)
class CriticalPointReport:
    """One stationary point with everything the expansion step needs.

    face_axis / face_inward_sign describe the boundary geometry when
    boundary_half is set: the point lies on a face orthogonal to
    face_axis, and the domain extends in the direction
    face_inward_sign * e_face from it.
    """

    location: tuple
    phi_value: complex
    hessian: HessianData
    boundary_half: bool
    amplitude_at: complex
    gradient_residual: float
    face_axis: int | None = None
    face_inward_sign: int = 1


@dataclass(frozen=True)
class Expansion:
    """Coefficient lists per stationary point plus phase prefactors.

    terms holds the plain coefficient sums across points (exact when
    every phi_value is zero); evaluation always uses the per-point
    breakdown together with phase_prefactors, so interference between
    points with different Im phi(x_p) is reproduced at every lam.
    """

    d: int
    terms: tuple
    per_point_breakdown: tuple
    phase_prefactors: tuple


def _grid_seeds(dom):
    axes = [np.linspace(lo, hi, _GRID_POINTS_PER_AXIS) for lo, hi in dom.bounds]
    grids = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    return [tuple(complex(v) for v in row) for row in pts]


def find_critical_points(phi, dom, seeds=None, amplitude=None):
    """Newton search for the stationary points of phi inside dom.

    phi (and the optional amplitude) are parsed expressions.  Seeds are
    taken from the user plus a real grid over the box; converged roots
    are de-duplicated, snapped onto faces they touch, and filtered:
    points with a noticeable imaginary part, points outside the closed
    box, and points with Re phi(x) > 1e-12 (exponentially negligible)
    are dropped.  A root on two or more faces is a corner and is
    rejected; a root on one face requires the halfspace_box kind.
    Raises when no seed converges, or when a root has a singular
    Hessian.
    """
    d = dom.dim
    grads = [diff_expr(phi, j) for j in range(d)]
    hess = [[diff_expr(grads[j], k) for k in range(d)] for j in range(d)]

    all_seeds = [tuple(complex(v) for v in s) for s in (seeds or [])]
    if d <= 3:
        all_seeds.extend(_grid_seeds(dom))
    elif not all_seeds:
        raise ValueError("provide seeds for dimension > 3")

    span = max(max(abs(lo), abs(hi)) for lo, hi in dom.bounds)
    diverged = 10.0 * (1.0 + span)

    roots = []
    best_residual = math.inf
    for seed in all_seeds:
        x = np.array(seed, dtype=complex)
        converged = False
        for _ in range(_NEWTON_MAX_ITER):
            try:
                g = np.array([eval_expr(gj, x) for gj in grads])
            except SingularPointError:
                break
            res = float(np.linalg.norm(g))
            best_residual = min(best_residual, res)
            if res <= _NEWTON_TOL:
                converged = True
                break
            try:
                jac = np.array([[eval_expr(hess[j][k], x) for k in range(d)]
                                for j in range(d)])
                step = np.linalg.solve(jac, g)
            except (SingularPointError, np.linalg.LinAlgError):
                break
            x = x - step
            if float(np.linalg.norm(x)) > diverged:
                break
        if not converged:
            continue
        if any(np.linalg.norm(x - r) < _DEDUPE_TOL for r in roots):
            continue
        roots.append(x)

    if not roots:
        raise NoStationaryPointError(
            "Newton iteration did not converge from any seed "
            f"(best gradient residual {best_residual:.3e})"
        )

    reports = []
    for x in sorted(roots, key=lambda r: tuple(v.real for v in r)):
        if float(np.max(np.abs(x.imag))) > _IMAG_TOL:
            continue
        loc = [complex(v.real, 0.0) for v in x]
        on_face = []
        inward = 1
        inside = True
        for i, (lo, hi) in enumerate(dom.bounds):
            width = max(1.0, hi - lo)
            if abs(loc[i].real - lo) <= _FACE_SNAP_TOL * width:
                loc[i] = complex(lo, 0.0)
                on_face.append((i, 1))
            elif abs(loc[i].real - hi) <= _FACE_SNAP_TOL * width:
                loc[i] = complex(hi, 0.0)
                on_face.append((i, -1))
            elif not lo < loc[i].real < hi:
                inside = False
        if not inside:
            continue
        loc = tuple(loc)
        value = eval_expr(phi, loc)
        if value.real > _RE_PHI_TOL:
            continue
        if len(on_face) >= 2:
            raise DomainError(
                "stationary point at a corner or edge of the box is not "
                "supported (only interior points and single-face points)"
            )
        if len(on_face) == 1:
            if dom.kind != "halfspace_box":
                raise DomainError(
                    "stationary point on a box face: declare the domain "
                    "kind halfspace_box"
                )
            face_axis, inward = on_face[0]
            boundary = True
        else:
            face_axis, boundary = None, False
        g = np.array([eval_expr(gj, loc) for gj in grads])
        h = np.array([[eval_expr(hess[j][k], loc) for k in range(d)]
                      for j in range(d)])
        h = 0.5 * (h + h.T)
        hdata = hessian_of_matrix(h)
        if hdata.degenerate:
            raise DegenerateHessianError(
                "stationary point has a singular Hessian (quadratically "
                "degenerate): expansion hypotheses are violated"
            )
        amp = eval_expr(amplitude, loc) if amplitude is not None else 1.0 + 0.0j
        reports.append(CriticalPointReport(
            location=loc,
            phi_value=complex(value),
            hessian=hdata,
            boundary_half=boundary,
            amplitude_at=complex(amp),
            gradient_residual=float(np.linalg.norm(g)),
            face_axis=face_axis,
            face_inward_sign=inward,
        ))
    return reports


def _flip_axis(series, axis):
    out = {k: (-v if k[axis] % 2 else v) for k, v in series.items()}
    return TruncatedSeries(series.dim, series.order, out)


def _det_series(mat):
    d = len(mat)
    if d == 1:
        return mat[0][0]
    total = None
    for perm in itertools.permutations(range(d)):
        inversions = sum(
            1 for i in range(d) for j in range(i + 1, d) if perm[i] > perm[j]
        )
        term = mat[0][perm[0]]
        for i in range(1, d):
            term = term * mat[i][perm[i]]
        if inversions % 2:
            term = -term
        total = term if total is None else total + term
    return total


def _fit_order(series, order):
    if series.order < order:
        return _promote(series, order)
    if series.order > order:
        return series.truncate(order)
    return series


def expand_at(phi, amplitude, report, order, branch_flip_stage1=False):
    """Coefficients c_0 .. c_order for one stationary point.

    phi and amplitude are truncated series re-centred at the point
    (phi may carry its constant term; it is removed here and lives on
    in the report's phase prefactor).  phi must be truncated at order
    + 2 or higher and the amplitude at order or higher.  For a face
    point the inward direction is reflected to the positive side, the
    face is mapped flat, and half-range monomial integrals are used;
    these carry the boundary factor 1/2 and produce odd-order terms.

    branch_flip_stage1 forwards to complete_squares; the coefficients
    are branch independent, so the flag exists only to let callers
    verify that orientation invariance end to end.
    """
    d = phi.dim
    if report.hessian.degenerate:
        raise DegenerateHessianError("degenerate Hessian: no expansion")
    if phi.order < order + 2:
        raise ValueError(
            f"phase truncation order {phi.order} too low for {order} "
            "coefficients (need order + 2)"
        )
    if amplitude.order < order:
        raise ValueError(
            f"amplitude truncation order {amplitude.order} too low for "
            f"{order} coefficients"
        )
    phi = phi - phi.constant_term

    face = report.face_axis if report.boundary_half else None
    if face is not None and report.face_inward_sign < 0:
        phi = _flip_axis(phi, face)
        amplitude = _flip_axis(amplitude, face)

    m = complete_squares(phi, face_axis=face,
                         branch_flip_stage1=branch_flip_stage1)
    w = phi.order - 1
    pushed = compose(_fit_order(amplitude, w), list(m.psi))
    jac = [[m.psi[i].diff(j) for j in range(d)] for i in range(d)]
    atilde = _fit_order(pushed * _det_series(jac), order)

    if report.boundary_half:
        coeffs = standard_phase_halfspace_expansion(atilde, order, face)
    else:
        coeffs = standard_phase_expansion(atilde, order)

    a0 = amplitude.constant_term
    if abs(a0) > 1e-12 * max(1.0, amplitude.max_abs()):
        isd = report.hessian.inv_sqrt_det
        closed = (2.0 * math.pi) ** (d / 2.0) * a0 * isd
        if report.boundary_half:
            closed *= 0.5
        if abs(coeffs[0] - closed) > 1e-9 * abs(closed):
            raise RuntimeError(
                "internal: series pipeline leading coefficient disagrees "
                "with the closed form"
            )
    return list(coeffs)


def assemble(reports, coefficient_lists, order=None):
    """Expansion object from per-point reports and coefficient lists."""
    reports = list(reports)
    lists = [tuple(cl) for cl in coefficient_lists]
    if not reports:
        raise ValueError("need at least one stationary point")
    if len(reports) != len(lists):
        raise ValueError("one coefficient list per stationary point")
    if order is None:
        order = len(lists[0]) - 1
    for cl in lists:
        if len(cl) != order + 1:
            raise ValueError("all points must be expanded to the same order")
    d = len(reports[0].location)
    terms = tuple(
        (l, sum(cl[l] for cl in lists)) for l in range(order + 1)
    )
    return Expansion(
        d=d,
        terms=terms,
        per_point_breakdown=tuple(zip(reports, lists)),
        phase_prefactors=tuple(r.phi_value for r in reports),
    )


def evaluate_partial_sum(expansion, lam, n_terms):
    """sum_p exp(-lam phi(x_p)) sum_{l < n_terms} c_l lam^(-(d+l)/2)."""
    lam = float(lam)
    if lam <= 0:
        raise ValueError("lam must be positive")
    available = len(expansion.per_point_breakdown[0][1])
    if not 1 <= n_terms <= available:
        raise ValueError(
            f"n_terms must be between 1 and {available} (have {n_terms})"
        )
    d = expansion.d
    total = 0.0 + 0.0j
    for (report, coeffs), phase in zip(
        expansion.per_point_breakdown, expansion.phase_prefactors
    ):
        inner = sum(
            coeffs[l] * lam ** (-(d + l) / 2.0) for l in range(n_terms)
        )
        total += cmath.exp(-lam * phase) * inner
    return total


def expand_integral(phi, amplitude, dom, order, seeds=None):
    """Full pipeline: search, per-point expansion, assembly.

    phi and amplitude are parsed expressions; order is the highest
    coefficient index kept per point.
    """
    reports = find_critical_points(phi, dom, seeds=seeds, amplitude=amplitude)
    if not reports:
        raise NoStationaryPointError(
            "no stationary point lies inside the domain (contributions are "
            "exponentially small); nothing to expand"
        )
    lists = []
    for r in reports:
        at = ExpansionPoint(r.location, order + 2)
        phi_s = taylor(phi, at, dim=dom.dim)
        amp_s = taylor(amplitude, at, dim=dom.dim)
        lists.append(expand_at(phi_s, amp_s, r, order))
    return assemble(reports, lists, order)


def higher_order_1d_closed_form(phi, amplitude=None):
    """(c_0, c_2) for a one-dimensional interior point, in closed form.

    c_2 multiplies lam^(-3/2), the first correction beyond leading
    order (the lam^(-1) coefficient vanishes identically for interior
    points).  Uses the hand-derived psi-derivative formulas:

        c_0 = sqrt(pi) A psi'
        c_2 = sqrt(pi)/4 (A'' psi'^3 + 3 A' psi' psi'' + A psi''')

    with A, A', A'' the amplitude derivatives at the point.  Serves as
    an independent oracle for the series pipeline.
    """
    if phi.dim != 1:
        raise ValueError("closed form is one-dimensional")
    p1, p2, p3 = one_d_psi_derivatives(phi)
    if amplitude is None:
        a0, a1, a2 = 1.0, 0.0, 0.0
    else:
        a0 = amplitude.constant_term
        a1 = amplitude.coefficient((1,))
        a2 = 2.0 * amplitude.coefficient((2,))
    c0 = math.sqrt(math.pi) * a0 * p1
    c2 = math.sqrt(math.pi) / 4.0 * (a2 * p1 ** 3 + 3.0 * a1 * p1 * p2 + a0 * p3)
    return c0, c2
