"""Closed-form Gaussian-monomial integrals and the standard-phase expansion.

With S(x) = sum_j x_j^2 the integrals

    int_{R^d} x^r exp(-lam S(x)) dx = beta_r * lam^{-(d+|r|)/2}

have elementary constants: beta_r is a product of Gamma values at half
integers, nonzero only when every component of r is even.  Feeding the
Maclaurin coefficients of an amplitude through beta_r yields the full
expansion of int A exp(-lam S) in decreasing half-integer powers of lam.

Half-range variants (one axis integrated over [0, inf) instead of R) are
provided for boundary stationary points; there the face axis contributes
(1/2) Gamma((n+1)/2) for every n, odd included.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

__all__ = [
    "MonomialConstant",
    "gamma_half",
    "monomial_integral_1d",
    "half_monomial_integral_1d",
    "beta",
    "beta_half",
    "standard_phase_expansion",
    "standard_phase_halfspace_expansion",
]

_SQRT_PI = math.sqrt(math.pi)


@lru_cache(maxsize=None)
def gamma_half(m):
    """Gamma(m/2) for positive integer m, by the half-integer recurrence.

    Exact at every argument this package ever needs; no general Gamma
    routine is involved.
    """
    m = int(m)
    if m <= 0:
        raise ValueError("gamma_half needs a positive integer argument")
    if m == 1:
        return _SQRT_PI
    if m == 2:
        return 1.0
    return (0.5 * m - 1.0) * gamma_half(m - 2)


@dataclass(frozen=True)
class MonomialConstant:
    """A multi-index together with its Gaussian moment constant."""

    index: tuple
    beta: float


def monomial_integral_1d(n, lam):
    """int_{-inf}^{inf} x^n exp(-lam x^2) dx for integer n >= 0, lam > 0."""
    n = int(n)
    if n < 0:
        raise ValueError("monomial degree must be nonnegative")
    lam = float(lam)
    if lam <= 0:
        raise ValueError("lam must be positive")
    if n % 2 == 1:
        return 0.0
    return gamma_half(n + 1) * lam ** (-(n + 1) / 2)


def half_monomial_integral_1d(n, lam):
    """int_0^{inf} x^n exp(-lam x^2) dx; nonzero for odd n as well."""
    n = int(n)
    if n < 0:
        raise ValueError("monomial degree must be nonnegative")
    lam = float(lam)
    if lam <= 0:
        raise ValueError("lam must be positive")
    return 0.5 * gamma_half(n + 1) * lam ** (-(n + 1) / 2)


def beta(r):
    """Gaussian moment constant for the multi-index r.

    beta(r) = prod_j Gamma((r_j + 1)/2) when every r_j is even, else 0.
    Equivalently pi^{d/2} prod_j r_j! / ((r_j/2)! 2^{r_j}).
    """
    out = 1.0
    for rj in r:
        rj = int(rj)
        if rj < 0:
            raise ValueError("multi-index components must be nonnegative")
        if rj % 2 == 1:
            return 0.0
        out *= gamma_half(rj + 1)
    return out


def beta_half(r, face_axis):
    """Half-range moment constant: axis face_axis runs over [0, inf).

    Off-face components must still be even for a nonzero value; the face
    component contributes (1/2) Gamma((r_f + 1)/2) for every parity.
    """
    r = tuple(int(v) for v in r)
    if not 0 <= face_axis < len(r):
        raise ValueError("face_axis out of range")
    out = 0.5
    for j, rj in enumerate(r):
        if rj < 0:
            raise ValueError("multi-index components must be nonnegative")
        if j != face_axis and rj % 2 == 1:
            return 0.0
        out *= gamma_half(rj + 1)
    return out


def _series_coefficients(amplitude, max_order, constant_for):
    if max_order < 0:
        raise ValueError("expansion order must be nonnegative")
    if amplitude.order < max_order:
        raise ValueError(
            "amplitude truncation order %d is below the requested expansion "
            "order %d" % (amplitude.order, max_order)
        )
    coeffs = [0j] * (max_order + 1)
    for key, value in amplitude.items():
        n = sum(key)
        if n <= max_order:
            coeffs[n] += value * constant_for(key)
    return coeffs


def standard_phase_expansion(amplitude, max_order):
    """Coefficients c_n of int A exp(-lam S) ~ sum c_n lam^{-(d+n)/2}.

    amplitude is a TruncatedSeries in d variables; the returned list has
    c_n at position n for n = 0..max_order.  Odd-n entries vanish because
    every odd moment of the Gaussian is zero.
    """
    return _series_coefficients(amplitude, max_order, beta)


def standard_phase_halfspace_expansion(amplitude, max_order, face_axis):
    """Half-range analogue: the face axis is integrated over [0, inf).

    Odd powers of the face variable now contribute, so odd-n entries are
    generally nonzero.
    """
    return _series_coefficients(
        amplitude, max_order, lambda key: beta_half(key, face_axis)
    )
