"""Staggered interaction matrix, its spectrum and the on-site shift tuning.

The coupling matrix is J_ij = (-1)^(i+j) * Gamma * K(r_ij) / Nkac, where
K(r) is a circulant kernel (b on site, d(r)^-alpha otherwise, with d the
nearest-image distance) and Nkac is the kernel row sum including the on-site
term.  Because J is a circulant conjugated by the staggered sign, its
eigenvalues are the discrete Fourier transform of the kernel and the vector
v_i = (-1)^i is always an eigenvector with eigenvalue exactly Gamma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import ModelParams


def nearest_image_distance(i: int, j: int, n: int) -> int:
    """Chain distance |i - j| folded by periodic boundary conditions."""
    r = abs(i - j) % n
    return min(r, n - r)


def build_kernel(n: int, alpha: float, b: float) -> np.ndarray:
    """Kernel values K(r) for r = 0..n-1.

    K(0) = b; K(r) = d(r)^-alpha with d(r) the nearest-image distance.
    alpha = inf gives the nearest-neighbor kernel (1 iff d(r) = 1).
    """
    if n % 2 != 0:
        raise ValueError(f"n must be even, got {n}")
    r = np.arange(n)
    d = np.minimum(r, n - r).astype(float)
    kernel = np.empty(n)
    kernel[0] = b
    if math.isinf(alpha):
        kernel[1:] = np.where(d[1:] == 1.0, 1.0, 0.0)
    else:
        kernel[1:] = d[1:] ** (-alpha)
    return kernel


def _offsite_fourier(n: int, alpha: float) -> np.ndarray:
    """Cosine transform of the off-site kernel at momenta 2*pi*m/n."""
    kernel = build_kernel(n, alpha, 0.0)
    # Real kernel, symmetric under r -> n - r, so the DFT is real.
    return np.fft.fft(kernel).real


def tune_b(n: int, alpha: float) -> float:
    """On-site shift that makes the smallest eigenvalue of J exactly zero.

    The eigenvalue numerators are b + g(m) with g the off-site cosine
    transform, so the minimum is zeroed by b = -min_m g(m).
    """
    return -float(np.min(_offsite_fourier(n, alpha)))


@dataclass(frozen=True)
class InteractionSpectrum:
    """Eigendecomposition of the staggered coupling matrix.

    eigenvalues:     D_k sorted descending.
    staggered_index: position of the (-1)^i mode (eigenvalue Gamma).
    modes:           n x n real table; column k holds the mode, scaled so
                     modes / sqrt(n) is orthogonal.
    kac_norm:        kernel row sum, on-site term included.
    """

    eigenvalues: np.ndarray
    staggered_index: int
    modes: np.ndarray
    kac_norm: float

    @property
    def nonzero_count(self) -> int:
        scale = max(abs(self.eigenvalues[0]), 1.0)
        return int(np.sum(np.abs(self.eigenvalues) > 1e-12 * scale))


def spectrum(params: ModelParams) -> InteractionSpectrum:
    """Diagonalize J via the FFT of its circulant kernel.

    The (-1)^i conjugation shifts all momenta by pi; in practice the real
    cosine/sine modes of the plain circulant are built first and then
    multiplied by the staggered sign.
    """
    n, alpha = params.n, params.alpha
    b = tune_b(n, alpha) if params.b is None else params.b
    kernel = build_kernel(n, alpha, b)
    kac = float(kernel.sum())
    fourier = np.fft.fft(kernel).real * params.gamma / kac

    sign = (-1.0) ** np.arange(n)
    sites = np.arange(n)
    eigenvalues = np.empty(n)
    modes = np.empty((n, n))
    col = 0
    for m in range(n // 2 + 1):
        theta = 2.0 * math.pi * m / n
        if m == 0 or m == n // 2:
            vec = np.cos(theta * sites)
            eigenvalues[col] = fourier[m]
            modes[:, col] = sign * vec
            col += 1
        else:
            eigenvalues[col] = eigenvalues[col + 1] = fourier[m]
            modes[:, col] = sign * math.sqrt(2.0) * np.cos(theta * sites)
            modes[:, col + 1] = sign * math.sqrt(2.0) * np.sin(theta * sites)
            col += 2

    order = np.argsort(-eigenvalues, kind="stable")
    eigenvalues = eigenvalues[order]
    modes = modes[:, order]
    # The staggered mode came from momentum zero: constant +/- pattern.
    staggered = int(np.argmax(np.abs(modes.T @ sign)))
    return InteractionSpectrum(
        eigenvalues=eigenvalues,
        staggered_index=staggered,
        modes=modes,
        kac_norm=kac,
    )


def build_dense_J(params: ModelParams) -> np.ndarray:
    """Dense coupling matrix J_ij = (-1)^(i+j) Gamma K(r_ij) / Nkac."""
    n = params.n
    b = tune_b(n, params.alpha) if params.b is None else params.b
    kernel = build_kernel(n, params.alpha, b)
    kac = kernel.sum()
    idx = np.arange(n)
    rij = (idx[:, None] - idx[None, :]) % n
    sign = (-1.0) ** (idx[:, None] + idx[None, :])
    return sign * params.gamma * kernel[rij] / kac
