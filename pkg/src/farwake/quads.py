"""Quadratic source terms of the integral equations.

From a flow state (u, v, omega) the transport equation needs the four
bilinear combinations

    R = u v,   S = (v^2 - u^2) / 2,   P = u omega,   Q = v omega,

computed mode-by-mode: temporal harmonics convolve exactly (the mode
count is small), y-products are dealiased by a 3/2-rule zero pad so a
product of band-limited fields is exact on the retained modes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import spectral as sp
from .errors import TailFitError, UnresolvedError
from .params import Grid

__all__ = [
    "QuadFields", "pad_modes", "truncate_modes", "spectral_product",
    "compute_quads", "moment_zero", "moment_y", "tail_exponent",
    "integrate_with_tail", "cumulative_from_right",
]


def pad_modes(f, ny_pad: int) -> np.ndarray:
    """Zero-pad an fft-ordered k-axis (last axis) to ny_pad points."""
    f = np.asarray(f)
    ny = f.shape[-1]
    if ny_pad < ny:
        raise ValueError("pad target smaller than input")
    out = np.zeros(f.shape[:-1] + (ny_pad,), dtype=complex)
    h = ny // 2
    out[..., :h] = f[..., :h]
    out[..., ny_pad - (ny - h):] = f[..., h:]
    return out


def truncate_modes(f, ny: int) -> np.ndarray:
    """Inverse of pad_modes: keep the low-|k| block of the last axis."""
    f = np.asarray(f)
    ny_pad = f.shape[-1]
    h = ny // 2
    out = np.empty(f.shape[:-1] + (ny,), dtype=complex)
    out[..., :h] = f[..., :h]
    out[..., h:] = f[..., ny_pad - (ny - h):]
    return out


def _padded_physical(f, grid: Grid, ny_pad: int) -> np.ndarray:
    return sp.to_physical(pad_modes(f, ny_pad), grid.L)


def spectral_product(a, b, grid: Grid) -> np.ndarray:
    """Pointwise product of two (nmodes, ny) spectral fields.

    Temporal modes are convolved directly (indices clipped to the
    retained band, which is the usual harmonic truncation); the y
    factor of each pairing is multiplied on a 3/2-padded physical grid.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    nm, ny = a.shape[-2], a.shape[-1]
    nt = (nm - 1) // 2
    ny_pad = 3 * ny // 2
    ay = _padded_physical(a, grid, ny_pad)
    by = _padded_physical(b, grid, ny_pad)
    out_y = np.zeros(a.shape[:-1] + (ny_pad,), dtype=complex)
    for n in range(-nt, nt + 1):
        acc = 0.0
        for m in range(max(-nt, n - nt), min(nt, n + nt) + 1):
            acc = acc + ay[..., m + nt, :] * by[..., n - m + nt, :]
        out_y[..., n + nt, :] = acc
    return truncate_modes(sp.to_spectral(out_y, grid.L), ny)


@dataclass
class QuadFields:
    """Spectral source fields on the station lattice, shape (nx, nmodes, ny)."""

    r: np.ndarray
    s: np.ndarray
    p: np.ndarray
    q: np.ndarray

    def reality_defect(self, grid: Grid) -> float:
        return max(sp.reality_defect(f, grid) for f in (self.r, self.s, self.p, self.q))


def compute_quads(u, v, omega, grid: Grid) -> QuadFields:
    """All four bilinear sources from spectral velocity/vorticity arrays."""
    uu = spectral_product(u, u, grid)
    vv = spectral_product(v, v, grid)
    return QuadFields(
        r=spectral_product(u, v, grid),
        s=(vv - uu) / 2.0,
        p=spectral_product(u, omega, grid),
        q=spectral_product(v, omega, grid),
    )


# ---------------------------------------------------------------------------
# moments of the temporal-mean mode


def moment_zero(f) -> np.ndarray:
    """Integral of f over y: the k = 0 coefficient."""
    return np.asarray(f)[..., 0]


def moment_y(f, grid: Grid, check: bool = True, tol: float = 1e-6) -> np.ndarray:
    """First y-moment from the k-derivative at the origin.

    Uses the five-point stencil on the spectral lattice; with
    f_hat(k) = int e^{iky} f dy the moment is -i f_hat'(0).  A large
    coefficient at the lattice edge means the moment is not resolved.
    """
    f = np.asarray(f, dtype=complex)
    if check:
        edge = np.abs(f[..., f.shape[-1] // 2])
        scale = np.max(np.abs(f), axis=-1)
        bad = edge > tol * np.maximum(scale, 1e-300)
        if np.any(bad & (scale > 0)):
            raise UnresolvedError(
                "spectral tail too large for a y-moment; refine the y grid")
    dk = np.pi / grid.L
    fp1, fp2 = f[..., 1], f[..., 2]
    fm1, fm2 = f[..., -1], f[..., -2]
    deriv = (-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * dk)
    return -1j * deriv


# ---------------------------------------------------------------------------
# streamwise integrals with power-law tails


def tail_exponent(x, m, default: float, lo: float = 0.5, hi: float = 6.0,
                  strict: bool = False) -> float:
    """Fit |m| ~ x^-gamma over the last decade of the station grid."""
    x = np.asarray(x, dtype=float)
    m = np.abs(np.asarray(m, dtype=float))
    sel = x >= x[-1] / 10.0
    xs, ms = x[sel], m[sel]
    good = ms > 0
    if good.sum() < 3:
        if strict:
            raise TailFitError("not enough nonzero samples for a tail fit")
        return default
    lx, lm = np.log(xs[good]), np.log(ms[good])
    slope = np.polyfit(lx, lm, 1)[0]
    if slope >= 0:
        if strict:
            raise TailFitError(f"tail grows (slope {slope:.3g}); no decaying fit")
        return default
    return float(np.clip(-slope, lo, hi))


def integrate_with_tail(x, m, gamma_default: float = 2.0,
                        strict: bool = False) -> float:
    """int_{x[0]}^inf m dx by trapezoid plus a fitted power-law tail."""
    x = np.asarray(x, dtype=float)
    m = np.asarray(m, dtype=float)
    body = np.trapezoid(m, x)
    gamma = tail_exponent(x, m, gamma_default, strict=strict)
    tail = m[-1] * x[-1] / (gamma - 1.0) if gamma > 1.0 else 0.0
    return float(body + tail)


def cumulative_from_right(x, m, gamma_default: float = 2.0) -> np.ndarray:
    """c_j = int_{x_j}^inf m dx for every station, trapezoid + tail."""
    x = np.asarray(x, dtype=float)
    m = np.asarray(m, dtype=complex)
    dx = np.diff(x)
    seg = 0.5 * (m[1:] + m[:-1]) * dx
    cum = np.zeros_like(m)
    cum[:-1] = seg[::-1].cumsum()[::-1]
    gr = tail_exponent(x, m.real, gamma_default)
    gi = tail_exponent(x, m.imag, gamma_default) if np.any(m.imag) else gr
    tail = 0.0
    if gr > 1.0:
        tail = tail + m[-1].real * x[-1] / (gr - 1.0)
    if np.any(m.imag) and gi > 1.0:
        tail = tail + 1j * m[-1].imag * x[-1] / (gi - 1.0)
    return cum + tail
