"""Nonconvex gradient-sparsity penalty and its weighted-l1 surrogate.

The scalar metric is ``psi_mu(t) = log(2 / (1 + exp(-t/mu))) / log 2``; it is
increasing, bounded by 1, and approaches the l0 indicator as ``mu -> 0``.
Evaluation uses ``log1p`` of the negative exponential so large ``t/mu`` never
overflows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import forward

_LOG2 = np.log(2.0)


@dataclass(frozen=True)
class PenaltyParams:
    """Scale parameter ``mu`` and penalization parameter ``lam``, both > 0."""

    mu: float
    lam: float

    def __post_init__(self):
        if self.mu <= 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if self.lam <= 0:
            raise ValueError(f"lam must be positive, got {self.lam}")


def _check_mu(mu):
    if mu <= 0:
        raise ValueError(f"mu must be positive, got {mu}")


def psi(t, mu):
    """Scalar sparsity metric; accepts nonnegative scalars or arrays."""
    _check_mu(mu)
    t = np.asarray(t, dtype=float)
    val = (_LOG2 - np.log1p(np.exp(-t / mu))) / _LOG2
    return float(val) if val.ndim == 0 else val

def psi_prime(t, mu):
    """Derivative of :func:`psi`, extended by continuity to ``1/(2 mu log 2)`` at 0.

    Strictly positive and strictly decreasing in ``t``.
    """
    _check_mu(mu)
    t = np.asarray(t, dtype=float)
    e = np.exp(-t / mu)
    val = e / (mu * _LOG2 * (1.0 + e))
    return float(val) if val.ndim == 0 else val


def penalty_value(g, mu):
    """Total penalty ``sum psi(|g_x|) + psi(|g_y|)`` over the grid."""
    gx, gy = g
    return float(np.sum(psi(np.abs(gx), mu)) + np.sum(psi(np.abs(gy), mu)))


def compute_weights(g, mu):
    """Reweighting coefficients ``psi'(|g_x|), psi'(|g_y|)``; strictly positive."""
    gx, gy = g
    return psi_prime(np.abs(gx), mu), psi_prime(np.abs(gy), mu)


def normalized_weights(g, mu):
    """Reweighting coefficients rescaled to (0, 1]: ``psi'(|g|)/psi'(0)``.

    Evaluates to ``2 / (1 + exp(|g|/mu))``; equal to 1 at zero gradient and
    decaying to 0 on strong edges, so any weighted-operator norm bound derived
    for unit weights remains valid.
    """
    _check_mu(mu)
    gx, gy = g
    with np.errstate(over="ignore"):
        wx = 2.0 / (1.0 + np.exp(np.abs(gx) / mu))
        wy = 2.0 / (1.0 + np.exp(np.abs(gy) / mu))
    return wx, wy


def weighted_l1(g, w):
    """Weighted anisotropic l1 of a gradient field: ``sum wx|gx| + wy|gy|``."""
    gx, gy = g
    wx, wy = w
    if np.shape(gx) != np.shape(wx):
        raise ValueError(
            f"dimension mismatch: gradient {np.shape(gx)} vs weights {np.shape(wx)}"
        )
    return float(np.sum(wx * np.abs(gx)) + np.sum(wy * np.abs(gy)))


def data_misfit(u, z, mask):
    """Least-squares data term ``0.5 || Phi u - z ||^2``."""
    r = forward(u, mask) - np.where(mask, z, 0.0)
    return 0.5 * float(np.vdot(r, r).real)


def objective_nonconvex(u, z, mask, params: PenaltyParams):
    """Nonconvex objective ``lam * F_mu(Du) + 0.5 || Phi u - z ||^2``."""
    from .operators import grad

    return params.lam * penalty_value(grad(u), params.mu) + data_misfit(u, z, mask)


def objective_surrogate(u, z, mask, w, lam):
    """Convex majorizer value ``lam * sum w|Du| + 0.5 || Phi u - z ||^2``."""
    from .operators import grad

    if lam < 0:
        raise ValueError(f"lam must be nonnegative, got {lam}")
    return lam * weighted_l1(grad(u), w) + data_misfit(u, z, mask)
