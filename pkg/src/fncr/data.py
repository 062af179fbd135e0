"""Phantoms, under-sampling masks, noise injection, and the PSNR metric."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Standard 10-ellipse phantom: intensity, semi-axes a/b, center x0/y0,
# rotation angle in degrees.
_SHEPP_LOGAN_ELLIPSES = np.array([
    [1.00, 0.6900, 0.920, 0.00, 0.0000, 0.0],
    [-0.80, 0.6624, 0.874, 0.00, -0.0184, 0.0],
    [-0.20, 0.1100, 0.310, 0.22, 0.0000, -18.0],
    [-0.20, 0.1600, 0.410, -0.22, 0.0000, 18.0],
    [0.10, 0.2100, 0.250, 0.00, 0.3500, 0.0],
    [0.10, 0.0460, 0.046, 0.00, 0.1000, 0.0],
    [0.10, 0.0460, 0.046, 0.00, -0.1000, 0.0],
    [0.10, 0.0460, 0.023, -0.08, -0.6050, 0.0],
    [0.10, 0.0230, 0.023, 0.00, -0.6060, 0.0],
    [0.10, 0.0230, 0.046, 0.06, -0.6050, 0.0],
])


@dataclass(frozen=True)
class MaskSpec:
    """Under-sampling pattern description.

    ``kind`` is one of ``radial`` (count = rays), ``parallel`` (count = lines)
    or ``random`` (rate in (0, 1], plus a seed).
    """

    kind: str
    n: int
    rays: int | None = None
    lines: int | None = None
    rate: float | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in ("radial", "parallel", "random"):
            raise ValueError(f"unknown mask kind {self.kind!r}")
        if self.n < 2:
            raise ValueError(f"grid side must be >= 2, got {self.n}")
        if self.kind == "radial" and (self.rays is None or self.rays < 1):
            raise ValueError("radial mask needs rays >= 1")
        if self.kind == "parallel":
            if self.lines is None or not 1 <= self.lines <= self.n:
                raise ValueError("parallel mask needs 1 <= lines <= n")
        if self.kind == "random" and (self.rate is None or not 0 < self.rate <= 1):
            raise ValueError("random mask needs rate in (0, 1]")


def shepp_logan(n):
    """Rasterize the analytic Shepp-Logan phantom on an n-by-n grid in [0, 1]."""
    if n < 32:
        raise ValueError(f"grid side must be >= 32, got {n}")
    ax = (np.arange(n) - (n - 1) / 2.0) / ((n - 1) / 2.0)
    xg, yg = np.meshgrid(ax, -ax)  # row 0 is the top of the image
    img = np.zeros((n, n))
    for amp, a, b, x0, y0, phi_deg in _SHEPP_LOGAN_ELLIPSES:
        phi = math.radians(phi_deg)
        c, s = math.cos(phi), math.sin(phi)
        x = xg - x0
        y = yg - y0
        inside = ((x * c + y * s) ** 2 / a**2 + (y * c - x * s) ** 2 / b**2) <= 1.0
        img[inside] += amp
    return np.clip(img, 0.0, 1.0)


def blocks_phantom(n):
    """Deterministic piecewise-constant phantom: nested rectangles plus a disk."""
    if n < 32:
        raise ValueError(f"grid side must be >= 32, got {n}")
    img = np.zeros((n, n))
    img[n // 8: 7 * n // 8, n // 8: 7 * n // 8] = 0.35
    img[n // 4: 5 * n // 8, 3 * n // 16: 7 * n // 16] = 0.75
    ii, jj = np.mgrid[0:n, 0:n]
    disk = (ii - 5 * n / 8.0) ** 2 + (jj - 5 * n / 8.0) ** 2 <= (n / 6.0) ** 2
    img[disk] = 1.0
    return img


def _radial_mask(n, rays):
    mask = np.zeros((n, n), dtype=bool)
    c = n // 2  # centered DC pixel
    for k in range(rays):
        phi = math.pi * k / rays
        # Each diameter runs border to border; its half-length depends on
        # where it leaves the square.
        reach = (n / 2.0) / max(abs(math.sin(phi)), abs(math.cos(phi)))
        # Supercover rasterization: mark every cell the segment passes through.
        steps = int(math.ceil(reach / 0.25))
        t = np.linspace(-reach, reach, 2 * steps + 1)
        rows = np.floor(c + 0.5 + t * math.sin(phi)).astype(int)
        cols = np.floor(c + 0.5 + t * math.cos(phi)).astype(int)
        keep = (rows >= 0) & (rows < n) & (cols >= 0) & (cols < n)
        mask[rows[keep], cols[keep]] = True
    mask[c, c] = True
    return mask


def _parallel_mask(n, lines):
    mask = np.zeros((n, n), dtype=bool)
    c = n // 2
    spacing = n / lines
    rows = (c + np.round(np.arange(lines) * spacing).astype(int)) % n
    mask[rows, :] = True
    return mask


def make_mask(spec: MaskSpec):
    """Boolean centered k-space mask; the DC entry is always set."""
    if spec.kind == "radial":
        mask = _radial_mask(spec.n, spec.rays)
    elif spec.kind == "parallel":
        mask = _parallel_mask(spec.n, spec.lines)
    else:
        rng = np.random.default_rng(spec.seed)
        mask = rng.random((spec.n, spec.n)) < spec.rate
    mask[spec.n // 2, spec.n // 2] = True
    return mask


def sampling_ratio(mask):
    """Percentage of sampled k-space locations."""
    mask = np.asarray(mask, dtype=bool)
    return 100.0 * float(np.count_nonzero(mask)) / mask.size


def add_noise(z, mask, delta, seed=None):
    """Perturb masked k-space data by a unit-norm complex Gaussian vector.

    The perturbation norm is exactly ``delta * ||z||``; unmasked entries stay
    zero.  Deterministic for a fixed seed.
    """
    if delta < 0:
        raise ValueError(f"delta must be nonnegative, got {delta}")
    z = np.asarray(z, dtype=complex)
    if delta == 0:
        return z.copy()
    znorm = np.linalg.norm(z)
    if znorm == 0:
        raise ValueError("cannot scale noise: z is identically zero")
    rng = np.random.default_rng(seed)
    mask = np.asarray(mask, dtype=bool)
    v = np.zeros_like(z)
    k = int(np.count_nonzero(mask))
    v[mask] = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    v /= np.linalg.norm(v)
    return z + delta * znorm * v


def psnr(u, x):
    """Peak signal-to-noise ratio of ``u`` against the reference ``x`` in dB."""
    u = np.asarray(u, dtype=float)
    x = np.asarray(x, dtype=float)
    if u.shape != x.shape:
        raise ValueError(f"shape mismatch: {u.shape} vs {x.shape}")
    peak = float(x.max())
    if peak <= 0:
        raise ValueError("reference image must have a positive maximum")
    rmse = math.sqrt(float(np.mean((u - x) ** 2)))
    if rmse == 0:
        return math.inf
    return 20.0 * math.log10(peak / rmse)
