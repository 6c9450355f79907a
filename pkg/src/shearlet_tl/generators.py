"""Smooth frequency windows for the cone-adapted shearlet systems.

Every window is built from one C-infinity transition profile ``sigma`` that
rises from 0 to 1 on [0, 1] and satisfies ``sigma(t) + sigma(1 - t) = 1``.
Squared windows that must telescope are evaluated piecewise so that the
overlapping pieces are exactly ``sin**2`` and ``cos**2`` of the same angle.

All evaluators accept scalars or arrays and are even in their arguments.
"""

from __future__ import annotations

import numpy as np

HALF_PI = 0.5 * np.pi


def _rho(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    with np.errstate(over="ignore", divide="ignore"):
        out[pos] = np.exp(-1.0 / t[pos])
    return out


def transition(t):
    """Flat C-infinity step: 0 for t <= 0, 1 for t >= 1.

    ``sigma(t) = rho(t) / (rho(t) + rho(1 - t))`` with ``rho(t) = exp(-1/t)``.
    """
    t = np.asarray(t, dtype=float)
    a = _rho(t)
    b = _rho(1.0 - t)
    out = np.where(t <= 0, 0.0, np.where(t >= 1, 1.0, a / (a + b)))
    return out if out.ndim else float(out)


def _cos_ramp(x):
    # cos(pi/2 * sigma(x)), pinned to exactly 1 / 0 on the flat parts
    x = np.asarray(x, dtype=float)
    out = np.cos(HALF_PI * np.atleast_1d(transition(x))).reshape(x.shape)
    out = np.where(x <= 0, 1.0, out)
    out = np.where(x >= 1, 0.0, out)
    return out


def _sin_ramp(x):
    x = np.asarray(x, dtype=float)
    out = np.sin(HALF_PI * np.atleast_1d(transition(x))).reshape(x.shape)
    out = np.where(x <= 0, 0.0, out)
    out = np.where(x >= 1, 1.0, out)
    return out


def _scalar(out):
    return float(out) if np.ndim(out) == 0 else out


def phi_meyer_1d(omega):
    """Rescaled Meyer scaling window: 1 on |w| <= 1/16, 0 for |w| >= 1/8."""
    w = np.abs(np.asarray(omega, dtype=float))
    return _scalar(_cos_ramp(16.0 * w - 1.0))


def _phi_meyer_1d_sq_complement(w):
    # 1 - phi_meyer_1d(w)**2 without cancellation
    return _sin_ramp(16.0 * w - 1.0) ** 2


def psi1_hat_sq(omega):
    """|psi1_hat|^2 = phi(w/4)^2 - phi(w)^2, supported in 1/16 <= |w| <= 1/2."""
    w = np.abs(np.asarray(omega, dtype=float))
    inner = _phi_meyer_1d_sq_complement(w)          # valid where phi(w/4) == 1
    outer = _cos_ramp(4.0 * w - 1.0) ** 2           # valid where phi(w) == 0
    return _scalar(np.where(w < 0.125, inner, outer))


def psi1_hat(omega):
    """Nonnegative square root of :func:`psi1_hat_sq`."""
    return _scalar(np.sqrt(psi1_hat_sq(omega)))


def psi2_hat(omega):
    """Directional bump v(w) = cos(pi/2 sigma(|w|)); v(0) = 1, supported in [-1, 1]."""
    w = np.abs(np.asarray(omega, dtype=float))
    return _scalar(_cos_ramp(w))


def phi_coarse_1d(omega):
    """1 on |w| <= 1/8, 0 for |w| >= 1/4."""
    w = np.abs(np.asarray(omega, dtype=float))
    return _scalar(_cos_ramp(8.0 * w - 1.0))


def phi_coarse_hat(xi1, xi2):
    """Separable coarse window of the cone-projected system, supported in [-1/4, 1/4]^2."""
    return _scalar(phi_coarse_1d(xi1) * phi_coarse_1d(xi2))


def Phi_hat(xi1, xi2):
    """Separable Meyer scaling window of the smooth Parseval system."""
    return _scalar(phi_meyer_1d(xi1) * phi_meyer_1d(xi2))


def Phi_hat_sq(xi1, xi2):
    return _scalar(np.asarray(Phi_hat(xi1, xi2)) ** 2)


def W_hat_sq(xi1, xi2):
    """W^2(xi) = Phi^2(xi/4) - Phi^2(xi).

    Nonnegative; ``Phi^2(xi) + sum_{j<=J} W^2(4^-j xi) = Phi^2(4^-(J+1) xi)``.
    """
    outer = np.asarray(Phi_hat_sq(np.asarray(xi1) / 4.0, np.asarray(xi2) / 4.0))
    inner = np.asarray(Phi_hat_sq(xi1, xi2))
    return _scalar(np.maximum(outer - inner, 0.0))


def W_hat(xi1, xi2):
    return _scalar(np.sqrt(W_hat_sq(xi1, xi2)))


# Dyadic (isotropic) Littlewood-Paley pair used for the classical spaces.

def dyadic_coarse_hat(xi1, xi2):
    """Radial window m(|xi|): 1 on |xi| <= 1, 0 for |xi| >= 2."""
    r = np.hypot(np.asarray(xi1, dtype=float), np.asarray(xi2, dtype=float))
    return _scalar(_cos_ramp(r - 1.0))


def dyadic_band_hat(xi1, xi2):
    """sqrt(m(|xi|)^2 - m(2|xi|)^2); supported in 1/2 < |xi| < 2.

    With this choice ``m(|xi|)^2 + sum_{nu>=1} band(2^-nu xi)^2 = 1``.
    """
    r = np.hypot(np.asarray(xi1, dtype=float), np.asarray(xi2, dtype=float))
    inner = _sin_ramp(2.0 * r - 1.0) ** 2   # where m(r) == 1
    outer = _cos_ramp(r - 1.0) ** 2         # where m(2r) == 0
    return _scalar(np.sqrt(np.where(r < 1.0, inner, outer)))
