"""Linear operators for under-sampled Fourier imaging.

Conventions used throughout the package:

* images are real ``(n, n)`` float arrays,
* k-space arrays are complex ``(n, n)`` in centered coordinates (DC at
  ``(n//2, n//2)``),
* masks are boolean ``(n, n)`` in the same centered layout,
* gradient fields and weight fields are ``(gx, gy)`` / ``(wx, wy)`` pairs of
  ``(n, n)`` arrays, where the x component differences along columns
  (axis 1) and the y component along rows (axis 0).

The FFT is unitary (``norm="ortho"``), so the masked sampling operator has
``lambda_max(Phi^T Phi) = 1`` and the forward-backward step bound is
``0 < beta < 2``.
"""

from __future__ import annotations

import numpy as np


def _check_square(a, name):
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be a square 2-D array, got shape {a.shape}")
    return a


def _check_same_n(a, b, name_a, name_b):
    if a.shape != b.shape:
        raise ValueError(
            f"dimension mismatch: {name_a} has shape {a.shape}, {name_b} has shape {b.shape}"
        )


def forward(u, mask):
    """Masked unitary 2-D Fourier sampling: ``M * fftshift(fft2(u))``.

    Entries off the mask are exactly zero.
    """
    u = _check_square(u, "u")
    mask = _check_square(mask, "mask")
    _check_same_n(u, mask, "u", "mask")
    z = np.fft.fftshift(np.fft.fft2(u, norm="ortho"))
    return np.where(mask, z, 0.0 + 0.0j)


def adjoint(z, mask):
    """Adjoint of :func:`forward`: real part of the unitary inverse FFT of ``M * z``."""
    z = _check_square(z, "z")
    mask = _check_square(mask, "mask")
    _check_same_n(z, mask, "z", "mask")
    zm = np.where(mask, z, 0.0 + 0.0j)
    return np.fft.ifft2(np.fft.ifftshift(zm), norm="ortho").real


def grad(u):
    """Backward-difference gradient ``(u_x, u_y)`` with zero extension.

    ``u_x[i, j] = u[i, j] - u[i, j-1]`` and the first column keeps ``u[i, 0]``
    itself (the out-of-range neighbor contributes zero); ``u_y`` is the same
    along rows.
    """
    u = _check_square(u, "u")
    ux = np.empty_like(u)
    ux[:, 0] = u[:, 0]
    ux[:, 1:] = u[:, 1:] - u[:, :-1]
    uy = np.empty_like(u)
    uy[0, :] = u[0, :]
    uy[1:, :] = u[1:, :] - u[:-1, :]
    return ux, uy


def grad_adjoint(g):
    """Adjoint of :func:`grad` (negative divergence with matching boundaries)."""
    gx, gy = g
    gx = _check_square(gx, "gx")
    gy = _check_square(gy, "gy")
    _check_same_n(gx, gy, "gx", "gy")
    out = np.empty_like(gx)
    out[:, :-1] = gx[:, :-1] - gx[:, 1:]
    out[:, -1] = gx[:, -1]
    out[:-1, :] += gy[:-1, :] - gy[1:, :]
    out[-1, :] += gy[-1, :]
    return out


def weighted_grad(u, w):
    """Weighted gradient ``(wx * u_x, wy * u_y)``."""
    wx, wy = w
    u = _check_square(u, "u")
    _check_same_n(u, np.asarray(wx), "u", "wx")
    ux, uy = grad(u)
    return wx * ux, wy * uy


def weighted_div(g, w):
    """Exact adjoint of :func:`weighted_grad`: ``D^T (w * g)``."""
    wx, wy = w
    gx, gy = g
    _check_same_n(np.asarray(gx), np.asarray(wx), "gx", "wx")
    return grad_adjoint((wx * gx, wy * gy))


def weighted_laplacian_apply(u, w):
    """Apply the weighted Laplacian ``-(D^T W^2 D) u``."""
    return -weighted_div(weighted_grad(u, w), w)


def laplacian_inf_norm(w):
    """Infinity norm of the weighted Laplacian matrix.

    Computed from the per-row absolute sums of the five-point stencil; for
    unit weights this is 8 on any grid with an interior pixel.
    """
    wx, wy = w
    ax = np.asarray(wx, dtype=float) ** 2
    ay = np.asarray(wy, dtype=float) ** 2
    _check_same_n(ax, ay, "wx", "wy")
    diag = ax + ay
    diag[:, :-1] += ax[:, 1:]
    diag[:-1, :] += ay[1:, :]
    off = np.zeros_like(diag)
    off[:, 1:] += ax[:, 1:]
    off[:, :-1] += ax[:, 1:]
    off[1:, :] += ay[1:, :]
    off[:-1, :] += ay[1:, :]
    return float(np.max(diag + off))
