"""Transforms and elementary operators on the (n, k) coefficient lattice.

Convention: fhat(k) = integral exp(+iky) f(y) dy, inverted by
f(y) = (2 pi)^-1 integral exp(-iky) fhat(k) dk.  On the periodic grid
of half-width L with ny nodes this becomes the discrete pair

    fhat_j = 2L (-1)^j ifft(f)_j,      f_m = (2L)^-1 fft(fhat * (-1)^j)_m,

with k_j = pi j / L in FFT ordering (the (-1)^j phase accounts for the
grid starting at y = -L rather than 0).  Differentiation in y is
multiplication by -ik.

Operators:

    dy        -- transverse derivative, symbol -ik
    op_I      -- antiderivative with antisymmetric normalization
    op_S      -- symmetrization  (S f)(k) = fhat(k) + fhat(-k)
    op_M      -- mean            (M f)    = fhat(0)
    op_P0     -- temporal mean   (n = 0 part)
    op_P      -- oscillatory part (n != 0 part)
    op_hilbert-- Hilbert transform, symbol i sigma(k), sigma(0) = 0

All of them act on arrays of shape (..., nmodes, ny) holding the
coefficients c[n](k); the temporal axis is ordered n = -nt .. nt.
"""

from __future__ import annotations

import numpy as np

from .errors import NonZeroMeanError
from .params import Grid, bracket

__all__ = [
    "to_spectral", "to_physical", "dy", "op_I", "op_S", "op_M",
    "op_P", "op_P0", "op_hilbert", "reality_defect", "lp_norm",
    "weighted_norm", "sup_norm", "mode_sum_lp",
]


def _phase(ny: int) -> np.ndarray:
    ph = np.ones(ny)
    ph[1::2] = -1.0
    return ph


def to_spectral(values, L: float) -> np.ndarray:
    """Forward transform along the last axis: y samples -> fhat(k_j)."""
    values = np.asarray(values)
    ny = values.shape[-1]
    return 2.0 * L * _phase(ny) * np.fft.ifft(values, axis=-1)


def to_physical(coeffs, L: float) -> np.ndarray:
    """Inverse transform along the last axis: fhat(k_j) -> y samples."""
    coeffs = np.asarray(coeffs, dtype=complex)
    ny = coeffs.shape[-1]
    return np.fft.fft(coeffs * _phase(ny), axis=-1) / (2.0 * L)


def dy(f, grid: Grid, order: int = 1) -> np.ndarray:
    """Transverse derivative of given order: multiply by (-ik)^order."""
    return np.asarray(f, dtype=complex) * (-1j * grid.k) ** order


def op_M(f) -> np.ndarray:
    """Mean in y per temporal mode: the k = 0 coefficient."""
    return np.asarray(f)[..., 0]


def op_S(f, grid: Grid) -> np.ndarray:
    """Symmetrization (S f)^(k) = fhat(k) + fhat(-k)."""
    f = np.asarray(f)
    return f + f[..., grid.flip_k()]


def op_P0(f, grid: Grid) -> np.ndarray:
    """Projection onto the temporally constant part (mode n = 0)."""
    f = np.asarray(f, dtype=complex)
    out = np.zeros_like(f)
    idx = grid.mode_index(0)
    out[..., idx, :] = f[..., idx, :]
    return out


def op_P(f, grid: Grid) -> np.ndarray:
    """Projection onto the oscillatory part (modes n != 0)."""
    f = np.asarray(f, dtype=complex)
    out = f.copy()
    out[..., grid.mode_index(0), :] = 0.0
    return out


def op_hilbert(f, grid: Grid) -> np.ndarray:
    """Hilbert transform: symbol i sigma(k) with sigma(0) = 0.

    The zero mode is annihilated, so H f always has zero mean; in
    particular mu = H nu satisfies M(mu) = 0 identically.
    """
    sigma = np.sign(grid.k)
    return np.asarray(f, dtype=complex) * (1j * sigma)


def _antisym_primitive(fy, dyy: float) -> np.ndarray:
    """(I f)(y) = int_{-L}^{y} f / 2 - int_{y}^{L} f / 2 by trapezoid."""
    # cumulative trapezoid along the last axis, F(y_0) = 0
    fy = np.asarray(fy)
    half = 0.5 * dyy * (fy[..., 1:] + fy[..., :-1])
    F = np.concatenate(
        [np.zeros(fy.shape[:-1] + (1,), dtype=half.dtype), np.cumsum(half, axis=-1)],
        axis=-1,
    )
    total = F[..., -1:]
    return F - 0.5 * total


def op_I(f, grid: Grid, mean_tol: float = 1e-10) -> np.ndarray:
    """Antiderivative in y with antisymmetric normalization.

    For k != 0 the symbol is 1/(-ik); the k = 0 coefficient of each
    mode is fixed to the mean of the normalized primitive
    (I f)(y) = int_{-inf}^{y} f / 2 - int_{y}^{inf} f / 2, evaluated by
    direct quadrature on the box.

    Raises NonZeroMeanError unless |M(P0 f)| <= mean_tol * ||P0 f||_1:
    the antiderivative of the temporal mean is unbounded otherwise.
    """
    f = np.asarray(f, dtype=complex)
    idx0 = f.shape[-2] // 2  # n = 0 slot of the odd-length mode axis
    f0y = to_physical(f[..., idx0, :], grid.L)
    l1 = np.sum(np.abs(f0y), axis=-1) * grid.dy
    mean0 = np.abs(f[..., idx0, 0])
    if np.any(mean0 > mean_tol * np.maximum(l1, 1e-300)):
        worst = float(np.max(mean0 / np.maximum(l1, 1e-300)))
        raise NonZeroMeanError(
            f"op_I needs a zero-mean temporal-mean part; relative mean = {worst:.3e}"
        )
    k = grid.k
    out = np.empty_like(f)
    nz = k != 0.0
    out[..., nz] = f[..., nz] / (-1j * k[nz])
    # k = 0 coefficient by direct quadrature of the primitive, per mode
    fy = to_physical(f, grid.L)
    prim = _antisym_primitive(fy, grid.dy)
    out[..., 0] = np.sum(prim, axis=-1) * grid.dy
    return out


def reality_defect(f, grid: Grid) -> float:
    """Max |c[-n](k) - conj(c[n](-k))| over the lattice.

    Zero (to round-off) iff the represented space-time field is real.
    """
    f = np.asarray(f, dtype=complex)
    flipped = f[..., ::-1, :][..., grid.flip_k()]
    return float(np.max(np.abs(f - np.conj(flipped))))


# ---------------------------------------------------------------------------
# norms


def lp_norm(fy, p: float, dyy: float) -> np.ndarray:
    """L^p norm in y along the last axis of physical-space samples."""
    a = np.abs(fy)
    if np.isinf(p):
        return np.max(a, axis=-1)
    return (np.sum(a ** p, axis=-1) * dyy) ** (1.0 / p)


def mode_sum_lp(f, p: float, grid: Grid, weight=None, deriv: int = 0) -> np.ndarray:
    """sum_n || w(y) * d^deriv/dy^deriv f_n ||_{L^p}, per leading index.

    `weight`, if given, is an array of y-space weights (e.g. |y|^beta).
    """
    f = np.asarray(f, dtype=complex)
    if deriv:
        f = dy(f, grid, deriv)
    fy = to_physical(f, grid.L)
    if weight is not None:
        fy = fy * weight
    return np.sum(lp_norm(fy, p, grid.dy), axis=-1)


def weighted_norm(f, p: float, sigma: float, x: float, grid: Grid) -> float:
    """<x>^sigma * sum_n ||f_n||_{L^p} for a single-station field."""
    return float(bracket(x) ** sigma * mode_sum_lp(f, p, grid))


def sup_norm(f, grid: Grid) -> float:
    """Plain sup over y and modes of |f_n(y)|, no weights."""
    fy = to_physical(np.asarray(f, dtype=complex), grid.L)
    return float(np.max(np.abs(fy)))
