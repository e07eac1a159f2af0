"""Evaluation of the Duhamel integral map for one fixed-point sweep.

The integral equations express (omega, u, v) at every station x as

    omega = K1(x - x0) w               + F1_omega + F2_omega
    u     = K1(x - x0) Lu w + K0 nu    + F1_u + F2_u + L1 S - L2 R
    v     = K1(x - x0) Lv w + K0 mu    + F1_v + F2_v - L1 R - L2 S

where F1 integrates the sources P = u*omega, Q = v*omega against the
upstream kernels over [x0, x] and F2 against the downstream kernels
over [x, inf).  Every composite kernel factorizes as a separation-
independent prefactor times exp(rate * s) with rate Lambda_- (upstream
heat family), Lambda_- - 1 (downstream heat family) or -|k| (Poisson
family), so each integral obeys a one-step recurrence in the station
index:

    G1[i] = e^{rate * dx} G1[i-1] + panel(i-1, i)
    G2[i] = e^{rate * dx} G2[i+1] + panel(i, i+1)

with |e^{rate dx}| <= 1 (unconditionally stable).  Panels use product
integration: the source is linear on the panel, the exponential is
integrated exactly, which keeps the quadrature uniformly accurate for
stiff rates on the coarse log-spaced grid.

The downstream integral is closed with geometric tail panels beyond
the last station, on which the sources are extrapolated by a fitted
power law.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import spectral as sp
from .kernels import Dispersion, apply_Lu, composite_prefactors, multiplier
from .params import Grid, Params
from .quads import QuadFields, tail_exponent
from .state import BoundaryData, FlowState

__all__ = ["panel_weights", "sweep_upstream", "sweep_downstream",
           "extend_tail", "DuhamelEngine"]

_ZC = 1e-2  # series/direct switch for the panel weights

# I0(z) = int_0^1 (1-t) e^{zt} dt, I1(z) = int_0^1 t e^{zt} dt
_W0 = (0.5, 1 / 6, 1 / 24, 1 / 120, 1 / 720, 1 / 5040)
_W1 = (0.5, 1 / 3, 1 / 8, 1 / 30, 1 / 144, 1 / 840)


def _series(z, coef):
    out = np.zeros_like(z)
    for c in reversed(coef):
        out = out * z + c
    return out


def panel_weights(z, decay):
    """Product-integration weights for one panel, normalized stably.

    For a panel parameterized by t in [0, 1] with integrand
    e^{z t} (A_left (1-t) + A_right t) the exact weights are
    I0(z) = (e^z - 1 - z)/z^2 and I1(z) = ((z-1)e^z + 1)/z^2.  Callers
    with Re z >= 0 must fold the decaying end factor in to avoid
    overflow, so this routine takes ``decay`` = e^{-z} (|decay| <= 1
    on both sweep directions) and returns

        u0 = e^{-z} I0(z) = (1 - (1+z) e^{-z}) / z^2
        u1 = e^{-z} I1(z) = (z - 1 + e^{-z}) / z^2

    with a series branch near z = 0.
    """
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < _ZC
    zs = np.where(small, 1.0, z)
    u0 = (1.0 - (1.0 + z) * decay) / zs ** 2
    u1 = (z - 1.0 + decay) / zs ** 2
    u0 = np.where(small, decay * _series(z, _W0), u0)
    u1 = np.where(small, decay * _series(z, _W1), u1)
    return u0, u1


def sweep_upstream(a, lam, x) -> np.ndarray:
    """G1[i] = int_{x0}^{x_i} e^{lam (x_i - xt)} a(xt) dxt for all stations.

    Re lam <= 0; a has shape (nx, ...) broadcastable against lam.
    G1[0] = 0.
    """
    a = np.asarray(a, dtype=complex)
    lam = np.asarray(lam, dtype=complex)
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(a)
    for i in range(1, a.shape[0]):
        dx = x[i] - x[i - 1]
        # e^{lam (x_i - xt)} = el * e^{z t} with t=(xt-x_{i-1})/dx,
        # z = -lam dx (Re z >= 0), el = e^{lam dx} the carry factor
        el = np.exp(lam * dx)
        u0, u1 = panel_weights(-lam * dx, el)
        out[i] = el * out[i - 1] + dx * (a[i - 1] * u0 + a[i] * u1)
    return out


def sweep_downstream(a, lam, x, nkeep: int | None = None) -> np.ndarray:
    """G2[i] = int_{x_i}^{x_end} e^{lam (xt - x_i)} a(xt) dxt.

    Re lam <= 0; the grid may extend past the physical stations (tail
    panels), in which case only the first ``nkeep`` stations are kept.
    """
    a = np.asarray(a, dtype=complex)
    lam = np.asarray(lam, dtype=complex)
    x = np.asarray(x, dtype=float)
    n = a.shape[0]
    nkeep = n if nkeep is None else nkeep
    out = np.zeros_like(a)
    for i in range(n - 2, -1, -1):
        dx = x[i + 1] - x[i]
        # e^{lam (xt - x_i)} = e^{z t} with z = lam dx, Re z <= 0.  The
        # reflection I0(z) = e^z I1(-z), I1(z) = e^z I0(-z) maps these
        # onto the stable folded pair at -z (Re >= 0):
        d = np.exp(lam * dx)
        u0, u1 = panel_weights(-lam * dx, d)
        out[i] = d * out[i + 1] + dx * (a[i] * u1 + a[i + 1] * u0)
    return out[:nkeep]


def extend_tail(x, a, gamma_default: float, xfac: float = 8.0,
                ratio: float = 1.1, max_panels: int = 64):
    """Append geometric tail nodes with power-law extrapolated sources.

    The decay exponent is fitted from the last decade of per-station
    source magnitudes and clamped to [0.5, 4].
    """
    x = np.asarray(x, dtype=float)
    a = np.asarray(a, dtype=complex)
    norms = np.sqrt(np.mean(np.abs(a) ** 2, axis=tuple(range(1, a.ndim))))
    gamma = tail_exponent(x, norms, gamma_default, lo=0.5, hi=4.0)
    xe = x[-1]
    xs = []
    while xe < xfac * x[-1] and len(xs) < max_panels:
        xe = xe * ratio
        xs.append(xe)
    if not xs:
        return x, a
    xt = np.asarray(xs)
    scale = (xt / x[-1]) ** (-gamma)
    tail = a[-1][None, ...] * scale.reshape((-1,) + (1,) * (a.ndim - 1))
    return np.concatenate([x, xt]), np.concatenate([a, tail], axis=0)


@dataclass
class DuhamelEngine:
    """Precomputed lattice data for repeated sweeps on one grid."""

    grid: Grid
    params: Params
    disp: Dispersion = field(init=False)
    pre: dict = field(init=False)
    l1: np.ndarray = field(init=False)
    l2: np.ndarray = field(init=False)
    lv: np.ndarray = field(init=False)
    k1x: np.ndarray = field(init=False)   # K1(x_i - x0) per station
    k0x: np.ndarray = field(init=False)   # K0(x_i - x0) per station

    def __post_init__(self):
        g, p = self.grid, self.params
        self.disp = Dispersion.for_grid(g, p.strouhal)
        self.pre = composite_prefactors(self.disp)
        self.l1 = multiplier("L1", self.disp)
        self.l2 = multiplier("L2", self.disp)
        self.lv = multiplier("Lv", self.disp)
        xi = (g.x - g.x0).reshape(-1, 1, 1)
        self.k1x = np.exp(self.disp.lamm[None] * xi)
        self.k0x = np.exp(-np.abs(self.disp.k)[None] * xi)

    def boundary_fields(self, bd: BoundaryData) -> FlowState:
        """The source-free part of the map (linear in the boundary data)."""
        g = self.grid
        gw = np.asarray(bd.w, dtype=complex)
        gu = apply_Lu(gw, g, self.disp, mean_tol=self.params.mean_tol)
        gv = self.lv * gw
        omega = self.k1x * gw[None]
        u = self.k1x * gu[None] + self.k0x * np.asarray(bd.nu)[None]
        v = self.k1x * gv[None] + self.k0x * np.asarray(bd.mu)[None]
        return FlowState(grid=g, u=u, v=v, omega=omega)

    def source_fields(self, quads: QuadFields) -> FlowState:
        """The quadratic part of the map: Duhamel integrals plus locals."""
        g = self.grid
        lamm = self.disp.lamm
        lam2 = lamm - 1.0
        lamp = -np.abs(self.disp.k) + 0j
        x = g.x

        g1h_p = sweep_upstream(quads.p, lamm, x)
        g1h_q = sweep_upstream(quads.q, lamm, x)
        g1p_q = sweep_upstream(quads.q, lamp, x)

        xe_p, ap = extend_tail(x, quads.p, gamma_default=1.5)
        xe_q, aq = extend_tail(x, quads.q, gamma_default=2.0)
        g2h_p = sweep_downstream(ap, lam2, xe_p, nkeep=g.nx)
        g2h_q = sweep_downstream(aq, lam2, xe_q, nkeep=g.nx)
        g2p_q = sweep_downstream(aq, lamp, xe_q, nkeep=g.nx)

        pre = self.pre
        omega = (pre[(1, "P", "omega", "heat")] * g1h_p
                 + pre[(1, "Q", "omega", "heat")] * g1h_q
                 + pre[(2, "P", "omega", "heat")] * g2h_p
                 + pre[(2, "Q", "omega", "heat")] * g2h_q)
        u = (pre[(1, "P", "u", "heat")] * g1h_p
             + pre[(1, "Q", "u", "heat")] * g1h_q
             + pre[(1, "Q", "u", "pois")] * g1p_q
             + pre[(2, "P", "u", "heat")] * g2h_p
             + pre[(2, "Q", "u", "heat")] * g2h_q
             + pre[(2, "Q", "u", "pois")] * g2p_q)
        v = (pre[(1, "P", "v", "heat")] * g1h_p
             + pre[(1, "Q", "v", "heat")] * g1h_q
             + pre[(1, "Q", "v", "pois")] * g1p_q
             + pre[(2, "P", "v", "heat")] * g2h_p
             + pre[(2, "Q", "v", "heat")] * g2h_q
             + pre[(2, "Q", "v", "pois")] * g2p_q)

        u = u + self.l1 * quads.s - self.l2 * quads.r
        v = v - self.l1 * quads.r - self.l2 * quads.s
        return FlowState(grid=g, u=u, v=v, omega=omega)

    def apply(self, quads: QuadFields, bd: BoundaryData) -> FlowState:
        lin = self.boundary_fields(bd)
        src = self.source_fields(quads)
        return FlowState(grid=self.grid, u=lin.u + src.u,
                         v=lin.v + src.v, omega=lin.omega + src.omega)
