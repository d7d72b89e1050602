"""Constructive Morse normal form for analytic phases.

Given a phase series with a nondegenerate quadratic part and no constant
or linear terms, builds a bi-holomorphic series map psi with

    phi(psi(y)) = S(y) = sum_j y_j^2

through the truncation order.  The forward map y(x) comes from iterated
completion of squares on the weighted quadratic decomposition of phi;
psi is its compositional inverse.  The overall orientation (the sign of
det J_psi at 0) is normalized to the product of inverse principal square
roots of the eigenvalues of half the Hessian, which is the choice that
makes the leading expansion coefficient continuous in the phase.

A stationary point on a box face is supported by keeping that axis last
in the elimination order: the final substitution y_last = (...)^{1/2} *
x_last sends the face {x_last = 0} to {y_last = 0} exactly, and the
pre-rotation never mixes the face axis with the others.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateHessianError
from .hessian import hessian_matrix_of, hessian_of_matrix, principal_sqrt_product
from .multiseries import (
    TruncatedSeries,
    _promote,
    compose,
    compose_map,
    invert_map,
    linear_matrix,
    max_abs_diff,
    reciprocal,
    sqrt_series,
)

__all__ = [
    "MorseData",
    "quadratic_decomposition",
    "pre_rotate_if_needed",
    "complete_squares",
    "one_d_psi_derivatives",
]


@dataclass(frozen=True)
class MorseData:
    """The change of variables x = psi(y) and its inverse y = forward(x).

    jac_det_at_0 is det of the linear part of psi, already sign-fixed.
    residual is the largest coefficient of phi(psi(y)) - S(y) through the
    truncation order of psi (one less than the input order).
    """

    psi: tuple
    forward: tuple
    jac_det_at_0: complex
    unitary_pre_rotation: np.ndarray
    residual: float


def _require_recentred(phi):
    scale = max(1.0, phi.max_abs())
    if abs(phi.constant_term) > 1e-9 * scale:
        raise ValueError("phase series must have zero constant term")
    d = phi.dim
    for j in range(d):
        key = tuple(1 if i == j else 0 for i in range(d))
        if abs(phi.coefficient(key)) > 1e-9 * scale:
            raise ValueError(
                "phase series must have zero linear part (re-centre at the "
                "stationary point)"
            )


def quadratic_decomposition(phi):
    """Symmetric matrix of series (phi_jk) with sum x_j x_k phi_jk = phi.

    Each coefficient a_r of phi with |r| >= 2 is spread over the pairs
    (j, k) with weight a_r r_j (r_k - delta_jk) / (|r| (|r| - 1)), then
    divided by the monomial x_j x_k.  The constant terms reproduce half
    the Hessian.
    """
    if phi.order < 2:
        raise ValueError("phase series must be truncated at order >= 2")
    _require_recentred(phi)
    d = phi.dim
    entries = [[{} for _ in range(d)] for _ in range(d)]
    for key, a in phi.items():
        n = sum(key)
        if n < 2:
            continue
        denom = n * (n - 1)
        for j in range(d):
            rj = key[j]
            if rj == 0:
                continue
            for k in range(d):
                rk = key[k] - (1 if j == k else 0)
                if rk <= 0:
                    continue
                w = a * rj * rk / denom
                nk = list(key)
                nk[j] -= 1
                nk[k] -= 1
                nk = tuple(nk)
                acc = entries[j][k]
                acc[nk] = acc.get(nk, 0j) + w
    order = phi.order - 2
    return [
        [TruncatedSeries(d, order, entries[j][k]) for k in range(d)]
        for j in range(d)
    ]


def _linear_map_series(mat, dim, order):
    xs = TruncatedSeries.identity_map(dim, order)
    out = []
    for i in range(dim):
        s = TruncatedSeries.zero(dim, order)
        for j in range(dim):
            if mat[i, j] != 0:
                s = s + xs[j].scale(mat[i, j])
        out.append(s)
    return out


def pre_rotate_if_needed(phi, frozen_axes=()):
    """Rotate coordinates until no Hessian diagonal entry vanishes.

    Returns (phi composed with the rotation, the rotation matrix U).
    U is a product of real Givens rotations (det +1) acting only on axes
    outside frozen_axes; diagonal entries below 1e-6 * ||Hess|| count as
    vanishing.  Raises for a singular Hessian, or when the frozen axes
    make the repair impossible.
    """
    h = hessian_matrix_of(phi)
    d = phi.dim
    if hessian_of_matrix(h).degenerate:
        raise DegenerateHessianError(
            "Hessian is singular: stationary point is quadratically degenerate"
        )
    thresh = 1e-6 * float(np.linalg.norm(h))
    frozen = set(frozen_axes)

    def bad_axes(m):
        return [i for i in range(d) if abs(m[i, i]) < thresh]

    if not bad_axes(h):
        return phi, np.eye(d)

    u = np.eye(d)
    hc = h.copy()
    free = [i for i in range(d) if i not in frozen]
    for _sweep in range(6):
        if not bad_axes(hc):
            break
        improved = False
        for a in range(len(free)):
            for b in range(a + 1, len(free)):
                i, j = free[a], free[b]
                if abs(hc[i, i]) >= thresh and abs(hc[j, j]) >= thresh:
                    continue
                current = min(abs(hc[i, i]), abs(hc[j, j]))
                best = None
                for step in range(1, 16):
                    t = step * math.pi / 32.0
                    g = np.eye(d)
                    g[i, i] = g[j, j] = math.cos(t)
                    g[i, j] = -math.sin(t)
                    g[j, i] = math.sin(t)
                    ht = g.T @ hc @ g
                    m = min(abs(ht[i, i]), abs(ht[j, j]))
                    if best is None or m > best[0]:
                        best = (m, g, ht)
                if best is not None and best[0] > current:
                    u = u @ best[1]
                    hc = best[2]
                    improved = True
        if not improved:
            break
    if bad_axes(hc):
        detail = (
            " without mixing the boundary axis" if frozen else ""
        )
        raise DegenerateHessianError(
            "unable to clear vanishing Hessian diagonal entries by plane "
            "rotations" + detail
        )
    inners = _linear_map_series(u, d, phi.order)
    return compose(phi, inners), u


def _relabel(f, newpos):
    out = {}
    for key, v in f.items():
        nk = [0] * f.dim
        for i, e in enumerate(key):
            nk[newpos[i]] = e
        out[tuple(nk)] = v
    return TruncatedSeries(f.dim, f.order, out)


def _flip_axis_sign(f, axis):
    out = {k: (-v if k[axis] % 2 else v) for k, v in f.items()}
    return TruncatedSeries(f.dim, f.order, out)


def complete_squares(phi, face_axis=None, branch_flip_stage1=False):
    """MorseData for a re-centred phase series.

    face_axis marks the axis whose coordinate plane contains the
    stationary point (boundary case); that axis is eliminated last so
    the face maps onto {y_face = 0}.  branch_flip_stage1 negates the
    square-root branch of the first elimination stage; the orientation
    normalization undoes its effect, which is exactly the testable
    content of the sign rule.
    """
    d, n = phi.dim, phi.order
    if n < 2:
        raise ValueError("phase series must be truncated at order >= 2")
    _require_recentred(phi)
    if face_axis is not None and not 0 <= face_axis < d:
        raise ValueError("face_axis out of range")
    w = max(n - 1, 1)

    if face_axis is not None and d > 1:
        olds = [i for i in range(d) if i != face_axis] + [face_axis]
        newpos = [0] * d
        for pos, old in enumerate(olds):
            newpos[old] = pos
        phi_p = _relabel(phi, newpos)
        frozen = (d - 1,)
    else:
        olds = None
        phi_p = phi
        frozen = ()

    phi_rot, u = pre_rotate_if_needed(phi_p, frozen_axes=frozen)
    quad = quadratic_decomposition(phi_rot)
    hscale = max(1.0, max(abs(quad[i][i].constant_term) for i in range(d)))
    work = [[_promote(quad[j][k], w) for k in range(d)] for j in range(d)]

    xs = TruncatedSeries.identity_map(d, w)
    forward = []
    for r in range(d):
        c = work[r][r]
        if abs(c.constant_term) <= 1e-12 * hscale:
            raise RuntimeError(
                "internal: vanishing diagonal after pre-rotation"
            )
        root = sqrt_series(c)
        if r == 0 and branch_flip_stage1:
            root = -root
        shift = xs[r]
        if r < d - 1:
            inv_c = reciprocal(c)
            for k in range(r + 1, d):
                shift = shift + xs[k] * (work[r][k] * inv_c)
            for j in range(r + 1, d):
                for k in range(j, d):
                    upd = work[j][k] - work[r][j] * work[r][k] * inv_c
                    work[j][k] = upd
                    if k != j:
                        work[k][j] = upd
        forward.append(root * shift)

    psi = invert_map(forward)

    if not np.allclose(u, np.eye(d)):
        psi = [
            sum(
                (psi[j].scale(u[i, j]) for j in range(d) if u[i, j] != 0),
                TruncatedSeries.zero(d, w),
            )
            for i in range(d)
        ]
        ut_map = _linear_map_series(u.T, d, w)
        forward = compose_map(forward, ut_map)

    if olds is not None:
        psi_o = [None] * d
        fwd_o = [None] * d
        for pos in range(d):
            psi_o[olds[pos]] = _relabel(psi[pos], olds)
            fwd_o[olds[pos]] = _relabel(forward[pos], olds)
        psi, forward = psi_o, fwd_o

    h = hessian_matrix_of(phi)
    target = 1.0 / principal_sqrt_product(np.linalg.eigvals(0.5 * h))
    jac_raw = complex(np.linalg.det(linear_matrix(psi)))
    sigma = jac_raw / target
    if abs(abs(sigma) - 1.0) > 1e-6:
        raise RuntimeError("internal: jacobian magnitude inconsistent with "
                           "the Hessian determinant")
    if sigma.real < 0:
        if d == 1 and face_axis is not None:
            raise RuntimeError("internal: principal branch must preserve the "
                               "half-line orientation in one variable")
        flip = 0 if (face_axis is None or face_axis != 0 or d == 1) else 1
        psi = [_flip_axis_sign(s, flip) for s in psi]
        forward = list(forward)
        forward[flip] = -forward[flip]
    jac = complex(np.linalg.det(linear_matrix(psi)))

    phw = phi.truncate(w) if phi.order > w else phi
    target_s = TruncatedSeries.zero(d, w)
    for j in range(d):
        key = tuple(2 if i == j else 0 for i in range(d))
        if w >= 2:
            target_s = target_s + TruncatedSeries(d, w, {key: 1.0})
    residual = max_abs_diff(compose(phw, psi), target_s)

    return MorseData(tuple(psi), tuple(forward), jac, u, residual)


def one_d_psi_derivatives(phi):
    """Closed-form psi'(0), psi''(0), psi'''(0) for a 1-D phase.

    Derived by matching phi(psi(y)) = y^2 through order 4: with
    a = phi''/2, b = phi'''/6, c = phi''''/24 and sa the principal root
    of a,

        psi'   = 1 / sa
        psi''  = -2 phi''' / (3 phi''^2)
        psi''' = 15 b^2 / (4 a^3 sa) - 3 c / (a^2 sa)

    (equivalently (5 [phi''']^2 - 3 phi'' phi'''') / (3 sqrt2 phi''^{7/2})
    with all fractional powers as odd powers of sa).
    """
    if phi.dim != 1:
        raise ValueError("closed forms are one-dimensional")
    if phi.order < 4:
        raise ValueError("need the phase through order 4")
    a = complex(phi.coefficient((2,)))
    b = complex(phi.coefficient((3,)))
    c = complex(phi.coefficient((4,)))
    if a == 0:
        raise DegenerateHessianError("phi''(0) = 0: degenerate phase")
    sa = complex(np.sqrt(a))
    psi1 = 1.0 / sa
    psi2 = -2.0 * (6.0 * b) / (3.0 * (2.0 * a) ** 2)
    psi3 = 15.0 * b * b / (4.0 * a ** 3 * sa) - 3.0 * c / (a ** 2 * sa)
    return psi1, psi2, psi3
