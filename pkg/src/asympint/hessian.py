"""Hessian data for a phase series: eigenvalues and the sign-resolved
inverse square root of the determinant.

The phase is complex analytic, so the Hessian at a stationary point is a
complex symmetric (not Hermitian) matrix.  The quantity that enters the
leading expansion coefficient is

    (det Hess)^{-1/2} := prod_k mu_k^{-1/2}

over the eigenvalues mu_k with principal square roots.  That product is
well defined exactly when no eigenvalue lies on the closed negative real
axis; crossing that axis is where the sign of the coefficient would
flip, so such phases are rejected rather than guessed at.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BranchCutError, DegenerateHessianError

__all__ = [
    "HessianData",
    "hessian_of",
    "hessian_matrix_of",
    "inv_sqrt_det",
    "principal_sqrt_product",
    "admissibility_spot_check",
]

_DEGENERACY_RTOL = 1e-10
_NEGATIVE_AXIS_RTOL = 1e-12


@dataclass(frozen=True)
class HessianData:
    """Second-derivative matrix with its spectral decomposition.

    inv_sqrt_det is None when an eigenvalue is on (or numerically
    indistinguishable from) the closed negative real axis; use the
    inv_sqrt_det() function to get the value-or-error behaviour.
    """

    matrix: np.ndarray
    eigenvalues: np.ndarray
    det: complex
    inv_sqrt_det: complex | None
    degenerate: bool


def _on_negative_axis(mu):
    m = abs(mu)
    return mu.real < 0 and abs(mu.imag) <= _NEGATIVE_AXIS_RTOL * m


def principal_sqrt_product(eigenvalues):
    """Product of principal square roots; raises on the branch cut."""
    out = 1.0 + 0.0j
    for mu in eigenvalues:
        mu = complex(mu)
        if mu == 0:
            raise DegenerateHessianError("zero eigenvalue has no square root")
        if _on_negative_axis(mu):
            raise BranchCutError(
                "eigenvalue %r lies on the closed negative real axis; the "
                "principal square root (sign rule) is undefined there" % mu
            )
        out *= np.sqrt(mu)
    return complex(out)


def hessian_matrix_of(phi):
    """The matrix of second partials of a series with zero linear part."""
    if phi.order < 2:
        raise ValueError("phase series must be truncated at order >= 2")
    d = phi.dim
    scale = max(1.0, phi.max_abs())
    for j in range(d):
        key = tuple(1 if i == j else 0 for i in range(d))
        if abs(phi.coefficient(key)) > 1e-8 * scale:
            raise ValueError(
                "phase series has a nonzero linear part; re-centre at the "
                "stationary point first"
            )
    m = np.zeros((d, d), dtype=complex)
    for i in range(d):
        for j in range(i, d):
            key = tuple(
                (2 if k == i else 0) if i == j else (1 if k in (i, j) else 0)
                for k in range(d)
            )
            c = complex(phi.coefficient(key))
            m[i, j] = m[j, i] = 2 * c if i == j else c
    return m


def hessian_of(phi):
    """HessianData for a re-centred phase series."""
    m = hessian_matrix_of(phi)
    return hessian_of_matrix(m)


def hessian_of_matrix(m):
    """HessianData from an explicit complex symmetric matrix."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    if np.max(np.abs(m - m.T)) > 1e-12 * max(1.0, np.max(np.abs(m))):
        raise ValueError("matrix must be symmetric")
    m = 0.5 * (m + m.T)
    eig = np.linalg.eigvals(m)
    eig = eig[np.lexsort((eig.imag, eig.real))]
    det = complex(np.linalg.det(m))
    mags = np.abs(eig)
    degenerate = bool(np.min(mags) <= _DEGENERACY_RTOL * max(1.0, np.max(mags)))
    isd = None
    if not degenerate and not any(_on_negative_axis(complex(mu)) for mu in eig):
        isd = 1.0 / principal_sqrt_product(eig)
    return HessianData(m, eig, det, isd, degenerate)


def inv_sqrt_det(h):
    """The sign-resolved (det Hess)^{-1/2}, or a documented error."""
    if h.degenerate:
        raise DegenerateHessianError(
            "Hessian is singular: stationary point is quadratically "
            "degenerate and has no Gaussian normal form"
        )
    if h.inv_sqrt_det is None:
        # reconstruct the precise complaint
        principal_sqrt_product(h.eigenvalues)
        raise BranchCutError("sign rule undefined for this spectrum")
    return h.inv_sqrt_det


def admissibility_spot_check(f, center, radius=1e-2, directions=100):
    """Minimum of Re f on a small sphere around center.

    f is a vectorized callable on (n, d) point arrays.  The directions
    are drawn from a fixed-seed generator so the check is deterministic.
    A return value below about -1e-9 means the nonnegative-real-part
    hypothesis fails near this point.
    """
    center = np.asarray(center, dtype=float)
    d = center.size
    if d == 1:
        dirs = np.array([[1.0], [-1.0]])
    else:
        rng = np.random.default_rng(20260823)
        dirs = rng.standard_normal((directions, d))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    pts = center[None, :] + radius * dirs
    vals = np.asarray(f(pts), dtype=complex)
    return float(np.min(vals.real))
