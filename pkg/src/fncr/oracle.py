"""Dense reference matrices for tests and diagnostics.

Everything here materializes O(n^4) entries and is guarded to n <= 64;
production code paths never touch this module.
"""

from __future__ import annotations

import numpy as np

_MAX_N = 64


def _guard(n):
    if n > _MAX_N:
        raise ValueError(f"dense oracle limited to n <= {_MAX_N}, got {n}")


def dense_gradient(n):
    """Stacked backward-difference matrices ``[Dx; Dy]`` of shape (2 n^2, n^2).

    Row-major pixel order; out-of-range neighbors contribute zero, so the
    first column/row differences keep the pixel value itself.
    """
    _guard(n)
    eye = np.eye(n)
    d = np.eye(n)
    d[1:, :-1] -= np.eye(n - 1)
    dx = np.kron(eye, d)   # differences along columns (within a row)
    dy = np.kron(d, eye)   # differences along rows
    return np.vstack([dx, dy])


def dense_weighted_gradient(w):
    """``diag([wx; wy]) @ [Dx; Dy]`` for a weight pair."""
    wx, wy = (np.asarray(c, dtype=float) for c in w)
    n = wx.shape[0]
    _guard(n)
    return np.concatenate([wx.ravel(), wy.ravel()])[:, None] * dense_gradient(n)


def dense_weighted_laplacian(w):
    """Weighted Laplacian ``-(G^T G)`` with ``G = diag(w) [Dx; Dy]``."""
    g = dense_weighted_gradient(w)
    return -(g.T @ g)


def dense_system(w, beta, theta):
    """System matrix ``I - beta theta Lap_w`` of the Bregman linear solve."""
    lap = dense_weighted_laplacian(w)
    return np.eye(lap.shape[0]) - beta * theta * lap


def dense_sampling(mask):
    """Masked unitary DFT matrix mapping vec(u) to centered vec(z)."""
    mask = np.asarray(mask, dtype=bool)
    n = mask.shape[0]
    _guard(n)
    f1 = np.fft.fft(np.eye(n), norm="ortho")
    shift = np.fft.fftshift(np.eye(n), axes=0)
    f1c = shift @ f1
    phi = np.kron(f1c, f1c)
    return mask.ravel()[:, None] * phi


def direct_solve(a, b):
    """Pivoted direct solve of a well-conditioned square system."""
    a = np.asarray(a, dtype=float)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got {a.shape}")
    return np.linalg.solve(a, np.asarray(b, dtype=float).ravel())


def spectral_radius(m):
    """Largest eigenvalue modulus; symmetric matrices use the real solver."""
    m = np.asarray(m)
    if np.allclose(m, m.T):
        return float(np.max(np.abs(np.linalg.eigvalsh(m))))
    return float(np.max(np.abs(np.linalg.eigvals(m))))


def is_diag_dominant(m):
    """Strict row diagonal dominance check."""
    m = np.asarray(m, dtype=float)
    diag = np.abs(np.diag(m))
    off = np.sum(np.abs(m), axis=1) - diag
    return bool(np.all(diag > off))
