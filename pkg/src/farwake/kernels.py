"""Dispersion relation, kernel symbols, and Fourier multipliers.

Everything downstream of the vorticity transport equation is driven by
the quadratic dispersion relation

    Lambda_0 = sqrt(1 + 4(k^2 + i n S)),   Re Lambda_0 >= 1,
    Lambda_pm = (1 pm Lambda_0) / 2,

so Lambda_+ + Lambda_- = 1 and Lambda_+ Lambda_- = -(k^2 + i n S).
The decaying rate Lambda_- obeys Re Lambda_- <= b(nS) - c(nS) k^2 for
|k| <= 1 and Re Lambda_- <= b(nS) - |k|/2 for |k| >= 1 with

    b(a) = (1/4) (1 - sqrt((1 + sqrt(1 + 16 a^2)) / 2)),
    c(a) = (1/2) sqrt((1 + sqrt(1 + 16 a^2)) / (2 + 32 a^2)).

Kernel symbols are functions of the streamwise separation s >= 0 and
(k, n); they are evaluated vectorized on the (n, k) lattice.  The
Poisson-scale source kernels F and G carry the convention
F = G = 0 at k = 0 (sigma(0) = 0).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import spectral as sp
from .params import Grid

__all__ = [
    "ALL_KERNELS", "Dispersion", "rate_b", "rate_c", "symbol",
    "apply_kernel", "multiplier", "apply_Lu", "composite_prefactors",
    "composite_symbol", "composite_from_prefactors", "COMPOSITE_TABLE",
]

# kernel identifiers understood by symbol()
ALL_KERNELS = (
    "K1", "K2", "K5", "K6", "K7", "K8", "K10", "K12", "K13",
    "Kr", "Ki", "K0", "Kc", "F", "G", "Fstar", "Gstar",
)


def rate_b(alpha):
    """Envelope rate at frequency alpha; sup_k Re Lambda_- = 2 b(alpha)."""
    alpha = np.asarray(alpha, dtype=float)
    return 0.25 * (1.0 - np.sqrt((1.0 + np.sqrt(1.0 + 16.0 * alpha ** 2)) / 2.0))


def rate_c(alpha):
    """Curvature of the Re Lambda_- envelope at small k."""
    alpha = np.asarray(alpha, dtype=float)
    root = np.sqrt(1.0 + 16.0 * alpha ** 2)
    return 0.5 * np.sqrt((1.0 + root) / (2.0 + 32.0 * alpha ** 2))


@dataclass(frozen=True)
class Dispersion:
    """Precomputed branch data on an (n, k) lattice.

    All arrays have shape (nmodes, ny) with the temporal axis ordered
    like ``grid.modes``.  ``ns`` is the per-mode frequency n * S.
    """

    k: np.ndarray
    ns: np.ndarray
    lam0: np.ndarray
    lamp: np.ndarray
    lamm: np.ndarray

    @classmethod
    def build(cls, k, ns) -> "Dispersion":
        k = np.asarray(k, dtype=float)
        ns = np.asarray(ns, dtype=float)
        K, N = np.broadcast_arrays(k[None, :], ns[:, None])
        lam0 = np.sqrt(1.0 + 4.0 * (K ** 2 + 1j * N))  # principal branch: Re >= 1
        return cls(K, N, lam0, (1.0 + lam0) / 2.0, (1.0 - lam0) / 2.0)

    @classmethod
    def for_grid(cls, grid: Grid, strouhal: float) -> "Dispersion":
        return cls.build(grid.k, grid.modes * strouhal)


def _sigma(k):
    return np.sign(k)


def symbol(kid: str, s, disp: Dispersion) -> np.ndarray:
    """Evaluate one elementary kernel symbol at separation s >= 0.

    s may be a scalar or an array broadcastable against the lattice.
    """
    k, ns = disp.k, disp.ns
    lam0, lamp, lamm = disp.lam0, disp.lamp, disp.lamm
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("kernel separation must be >= 0")
    heat = np.exp(lamm * s)
    if kid == "K1":
        return heat
    if kid == "K2":
        return -1j * k * heat / lam0
    if kid == "K8":
        return np.real(lamm) * heat / lam0
    if kid == "K10":
        return 1j * np.imag(lamm) * heat / lam0
    if kid == "K5":
        return k ** 2 * heat / (lam0 * (lamp + 1j * ns))
    if kid == "K6":
        return k * ns * heat / (lam0 * (lamp + 1j * ns))
    if kid == "K7":
        return -1j * ns * lamp * heat / (lam0 * (lamp + 1j * ns))
    if kid in ("K12", "K13", "Kr", "Ki"):
        # denominators Lambda_- + i n S vanish only at n = 0, k = 0,
        # where the n = 0 reductions below are regular.
        n0 = ns == 0.0
        den = np.where(n0, 1.0, lam0 * (lamm + 1j * ns))
        if kid == "K12":
            # n = 0: k^2 / Lambda_- = -Lambda_+ exactly
            reg = -lamp * heat / lam0
            return np.where(n0, reg, k ** 2 * heat / den)
        if kid == "K13":
            return np.where(n0, 0.0, k * ns * heat / den)
        if kid == "Kr":
            return np.where(n0, 0.0, 1j * ns * np.real(lamm) * heat / den)
        return np.where(n0, 0.0, -ns * np.imag(lamm) * heat / den)  # Ki
    pois = np.exp(-np.abs(k) * s)
    if kid == "K0":
        return pois + 0j * ns
    if kid == "Kc":
        return np.exp(-k ** 2 * s) + 0j * ns
    if kid in ("F", "G", "Fstar", "Gstar"):
        sg = 1.0 if kid in ("F", "G") else -1.0
        den = 1j * k + sg * ns * _sigma(k)
        safe = np.where(den == 0, 1.0, den)
        if kid in ("F", "Fstar"):
            out = 1j * k * pois / safe
        else:
            out = sg * np.abs(k) * pois / safe
        return np.where(den == 0, 0.0, out)
    raise KeyError(f"unknown kernel id {kid!r}")


def apply_kernel(kid: str, s, f, disp: Dispersion) -> np.ndarray:
    """Multiply a lattice field by a kernel symbol at separation s."""
    return symbol(kid, s, disp) * np.asarray(f, dtype=complex)


# ---------------------------------------------------------------------------
# Fourier multipliers of the velocity reconstruction


def multiplier(which: str, disp: Dispersion) -> np.ndarray:
    """Static multipliers L1, L2, Lv, and the regular part of Lu.

    L1 = k^2/(k^2 + (nS)^2) with L1 = 1 at the (0,0) node (it acts as
    the identity on the temporal mean); L2 = k nS/(k^2 + (nS)^2), odd
    in k, which is what keeps real fields real and preserves y-parity.
    Lv = Lambda_-/(Lambda_- + i n S), equal to 1 on n = 0.  "Lu_reg"
    is Lu + I P0, i.e. the bounded remainder after the antiderivative
    has been split off: -ik/Lambda_+ on n = 0 and ik/(Lambda_- + i nS)
    on n != 0.
    """
    k, ns = disp.k, disp.ns
    n0 = ns == 0.0
    if which == "L1":
        den = k ** 2 + ns ** 2
        safe = np.where(den == 0.0, 1.0, den)
        out = k ** 2 / safe
        return np.where(den == 0.0, np.where(n0, 1.0, 0.0), out).astype(complex)
    if which == "L2":
        den = k ** 2 + ns ** 2
        safe = np.where(den == 0.0, 1.0, den)
        return np.where(den == 0.0, 0.0, k * ns / safe).astype(complex)
    if which == "Lv":
        den = disp.lamm + 1j * ns
        safe = np.where(n0, 1.0, den)
        return np.where(n0, 1.0 + 0j, disp.lamm / safe)
    if which == "Lu_reg":
        den = disp.lamm + 1j * ns
        safe = np.where(n0, 1.0, den)
        return np.where(n0, -1j * k / disp.lamp, 1j * k / safe)
    raise KeyError(f"unknown multiplier {which!r}")


def apply_Lu(f, grid: Grid, disp: Dispersion, mean_tol: float = 1e-10) -> np.ndarray:
    """Full velocity multiplier Lu = -I P0 + regular part.

    The antiderivative route requires the temporal mean of f to have
    zero mean in y (raises NonZeroMeanError otherwise), exactly the
    class condition on the boundary vorticity.
    """
    f = np.asarray(f, dtype=complex)
    reg = multiplier("Lu_reg", disp) * f
    p0 = sp.op_P0(f, grid)
    return reg - sp.op_I(p0, grid, mean_tol=mean_tol)


# ---------------------------------------------------------------------------
# composite kernels of the Duhamel integrals
#
# Keys are (part, source, field): part in {1, 2} for the upstream
# (x~ < x) and downstream (x~ > x) integrals, source in {"P", "Q"},
# field in {"omega", "u", "v"}.  Values list elementary kernels with
# sign and an optional extra factor exp(-s) (the "2" kernels all decay
# at least like exp(-s) through Lambda_- - 1).


def _table():
    e = "exp(-s)"
    return {
        (1, "P", "omega"): [(-1, "K8", None), (-1, "K10", None)],
        (1, "Q", "omega"): [(-1, "K2", None)],
        (2, "P", "omega"): [(-1, "K1", e), (-1, "K8", e), (-1, "K10", e)],
        (2, "Q", "omega"): [(-1, "K2", e)],
        (1, "P", "u"): [(+1, "K2", None), (-1, "K13", None)],
        (1, "Q", "u"): [(-1, "F", None), (-1, "K12", None)],
        (2, "P", "u"): [(+1, "K2", e), (-1, "K6", e)],
        (2, "Q", "u"): [(+1, "Fstar", None), (-1, "K5", e)],
        (1, "P", "v"): [(-1, "K8", None), (-1, "K10", None),
                        (+1, "Kr", None), (+1, "Ki", None)],
        (1, "Q", "v"): [(-1, "K2", None), (+1, "G", None), (+1, "K13", None)],
        (2, "P", "v"): [(-1, "K1", e), (-1, "K8", e), (-1, "K10", e),
                        (-1, "K7", e)],
        (2, "Q", "v"): [(-1, "K2", e), (-1, "Gstar", None), (+1, "K6", e)],
    }


COMPOSITE_TABLE = _table()


def composite_symbol(part: int, source: str, fld: str, s, disp: Dispersion) -> np.ndarray:
    """Composite kernel as the signed sum of elementary symbols."""
    out = 0.0
    damp = np.exp(-np.asarray(s, dtype=float))
    for sign, kid, extra in _table()[(part, source, fld)]:
        term = sign * symbol(kid, s, disp)
        if extra is not None:
            term = term * damp
        out = out + term
    return out


def composite_prefactors(disp: Dispersion) -> dict:
    """Separation-independent prefactors of the composite kernels.

    Each composite kernel factorizes as  prefactor(k, n) * exp(rate * s)
    with rate Lambda_- (part 1, heat family), Lambda_- - 1 (part 2,
    heat family), or -|k| (Poisson family, Q sources of u and v only).
    The returned dict maps (part, source, field, family) to the
    prefactor lattice; the solver turns the shared exponential sums
    into field updates by multiplying with these.

    At the (n, k) = (0, 0) node the Poisson-family entries take their
    continuity limits (the conventions F(0) = G(0) = 0 do not apply
    inside the composites): this is exactly what makes the mean of u
    an invariant of the integral equations.
    """
    k, ns = disp.k, disp.ns
    lam0, lamp, lamm = disp.lam0, disp.lamp, disp.lamm
    n0 = ns == 0.0
    node = n0 & (k == 0.0)
    sig = _sigma(k)

    den_m = np.where(n0, 1.0, lam0 * (lamm + 1j * ns))   # n != 0 only
    den_p = lam0 * (lamp + 1j * ns)                      # never zero
    dF1 = 1j * k + ns * sig                              # zero only at node/axis
    dF2 = 1j * k - ns * sig
    sF1 = np.where(dF1 == 0, 1.0, dF1)
    sF2 = np.where(dF2 == 0, 1.0, dF2)

    pre = {}
    pre[(1, "P", "omega", "heat")] = -lamm / lam0
    pre[(1, "Q", "omega", "heat")] = 1j * k / lam0
    pre[(2, "P", "omega", "heat")] = -lamp / lam0
    pre[(2, "Q", "omega", "heat")] = 1j * k / lam0

    # u, part 1: heat P, heat Q (k^2 / Lambda_- = -Lambda_+ on n = 0)
    pre[(1, "P", "u", "heat")] = np.where(
        n0, -1j * k / lam0, -1j * k * lamm / den_m)
    pre[(1, "Q", "u", "heat")] = np.where(
        n0, lamp / lam0, -k ** 2 / den_m)
    pre[(1, "Q", "u", "pois")] = np.where(
        dF1 == 0, np.where(node, -1.0, 0.0), -1j * k / sF1)
    # u, part 2
    pre[(2, "P", "u", "heat")] = -1j * k * lamp / den_p
    pre[(2, "Q", "u", "heat")] = -k ** 2 / den_p
    pre[(2, "Q", "u", "pois")] = np.where(
        dF2 == 0, np.where(node, 1.0, 0.0), 1j * k / sF2)

    # v, part 1
    pre[(1, "P", "v", "heat")] = np.where(
        n0, -lamm / lam0, -lamm ** 2 / den_m)
    pre[(1, "Q", "v", "heat")] = np.where(
        n0, 1j * k / lam0, 1j * k * lamm / den_m)
    pre[(1, "Q", "v", "pois")] = np.where(dF1 == 0, 0.0, np.abs(k) / sF1)
    # v, part 2
    pre[(2, "P", "v", "heat")] = -lamp ** 2 / den_p
    pre[(2, "Q", "v", "heat")] = 1j * k * lamp / den_p
    pre[(2, "Q", "v", "pois")] = np.where(dF2 == 0, 0.0, np.abs(k) / sF2)

    return {key: np.asarray(val, dtype=complex) for key, val in pre.items()}


def composite_from_prefactors(part: int, source: str, fld: str, s,
                              disp: Dispersion, pre: dict | None = None) -> np.ndarray:
    """Composite kernel rebuilt from the factorized form (for checks)."""
    if pre is None:
        pre = composite_prefactors(disp)
    s = np.asarray(s, dtype=float)
    heat_rate = disp.lamm if part == 1 else disp.lamm - 1.0
    out = pre[(part, source, fld, "heat")] * np.exp(heat_rate * s)
    key = (part, source, fld, "pois")
    if key in pre:
        out = out + pre[key] * np.exp(-np.abs(disp.k) * s)
    return out
