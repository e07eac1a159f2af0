"""Field containers and the composite solution norm.

A ``FlowState`` holds the three fields (u, v, omega) as coefficient
lattices over all stations; ``BoundaryData`` holds the three boundary
slices (nu, mu, w) at x0 that drive the integral equations.  The
composite norm below is the sum of ten weighted components; its value
on a state controls every nonlinear estimate, and the Picard iteration
measures its increments in exactly this norm.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import spectral as sp
from .errors import PreconditionError
from .params import Grid, Params, bracket

__all__ = [
    "SpectralField", "FlowState", "BoundaryData", "NormReport",
    "composite_norm", "boundary_norm", "parity_defect",
]


@dataclass
class SpectralField:
    """Coefficients c[n](k) of one scalar field at one station."""

    grid: Grid
    data: np.ndarray  # (nmodes, ny) complex

    def physical(self) -> np.ndarray:
        return sp.to_physical(self.data, self.grid.L)

    def mode(self, n: int) -> np.ndarray:
        return self.data[self.grid.mode_index(n)]

    def reality_defect(self) -> float:
        return sp.reality_defect(self.data, self.grid)


@dataclass
class FlowState:
    """(u, v, omega) coefficient lattices on all stations.

    Arrays have shape (nx, nmodes, ny).  ``meta`` carries solver
    diagnostics (sweep count, increment history, tail exponents...).
    """

    grid: Grid
    u: np.ndarray
    v: np.ndarray
    omega: np.ndarray
    meta: dict = field(default_factory=dict)

    @classmethod
    def zeros(cls, grid: Grid) -> "FlowState":
        shape = (grid.nx, grid.nmodes, grid.ny)
        return cls(grid, np.zeros(shape, complex), np.zeros(shape, complex),
                   np.zeros(shape, complex))

    def copy(self) -> "FlowState":
        return FlowState(self.grid, self.u.copy(), self.v.copy(),
                         self.omega.copy(), dict(self.meta))

    def fields(self):
        return {"u": self.u, "v": self.v, "omega": self.omega}

    def reality_defect(self) -> float:
        return max(sp.reality_defect(f, self.grid) for f in
                   (self.u, self.v, self.omega))


@dataclass
class BoundaryData:
    """Boundary slices at x0: vorticity seed w and velocity traces.

    nu is the u-trace generator, mu = H nu its conjugate; w seeds the
    vorticity.  Class membership requires M(P0 w) = 0 (within the
    zero-mean tolerance) and a finite boundary norm.
    """

    grid: Grid
    w: np.ndarray   # (nmodes, ny)
    nu: np.ndarray
    mu: np.ndarray

    def validate(self, params: Params, check_ball: bool = False) -> "BoundaryData":
        """Consistency checks; the ball-radius check is opt-in.

        Data outside the contraction ball is still legal input for the
        solver (it simply may not contract), so only callers that want
        the a-priori guarantee ask for check_ball.
        """
        g = self.grid
        hnu = sp.op_hilbert(self.nu, g)
        scale = max(float(np.max(np.abs(self.nu))), 1e-300)
        if np.max(np.abs(self.mu - hnu)) > 1e-10 * scale:
            raise PreconditionError("boundary data: mu != H nu")
        w0 = self.w[g.mode_index(0)]
        l1 = float(np.sum(np.abs(sp.to_physical(w0, g.L)))) * g.dy
        if abs(w0[0]) > params.mean_tol * max(l1, 1e-300):
            raise PreconditionError(
                f"boundary data: M(P0 w) = {abs(w0[0]):.3e} not zero "
                f"(tolerance {params.mean_tol:.1e} * ||w||_1)"
            )
        if check_ball:
            bn = boundary_norm(self, params)
            if not np.isfinite(bn) or bn > params.rho:
                raise PreconditionError(
                    f"boundary norm {bn:.4g} outside ball of radius {params.rho}"
                )
        return self


@dataclass
class NormReport:
    """Composite-norm breakdown: per-station curves and their sups."""

    stations: np.ndarray
    per_station: dict[str, np.ndarray]
    components: dict[str, float]
    total: float
    mode_tail: float  # relative size of the highest retained |n| modes


# (name, field, p, deriv, weight_beta) -> sigma(params)
def _component_table(pr: Params):
    return [
        ("u_inf",    "u",     np.inf, 0, None, 0.5),
        ("u_q",      "u",     pr.q,   0, None, 0.5 - 1.0 / pr.q),
        ("du_r",     "u",     pr.r,   1, None, 1.0 - 1.0 / (2 * pr.r) - pr.eta),
        ("v_inf",    "v",     np.inf, 0, None, 1.0 - pr.phi),
        ("v_p",      "v",     pr.p,   0, None, 1.0 - pr.phi - 1.0 / pr.p),
        ("dv_r",     "v",     pr.r,   1, None, 1.5 - 1.0 / (2 * pr.r) - pr.xi),
        ("w_2",      "omega", 2.0,    0, None, 0.75),
        ("w_b2",     "omega", 2.0,    0, pr.beta, 0.75 - pr.beta / 2.0),
        ("dw_inf",   "omega", np.inf, 1, None, 1.5),
        ("dw_1",     "omega", 1.0,    1, None, 1.0),
    ]


def composite_norm(state: FlowState, params: Params, station: int | None = None) -> NormReport:
    """The ten-component weighted solution norm the contraction runs in.

    Every component is sup over stations of
    <x>^sigma * sum_n || |y|^beta d^m/dy^m f_n ||_{L^p};
    ``station`` restricts the sup to a single station index.
    """
    g = state.grid
    xs = g.x if station is None else g.x[station:station + 1]
    sl = slice(None) if station is None else slice(station, station + 1)
    fields = {"u": state.u[sl], "v": state.v[sl], "omega": state.omega[sl]}
    absy = np.abs(g.y)
    curves, sups = {}, {}
    for name, fld, p, m, beta, sigma in _component_table(params):
        w = absy ** beta if beta is not None else None
        vals = sp.mode_sum_lp(fields[fld], p, g, weight=w, deriv=m)
        curve = bracket(xs) ** sigma * vals
        curves[name] = curve
        sups[name] = float(np.max(curve))
    total = float(sum(sups.values()))
    # truncation diagnostic: size of the extreme modes vs the n = 0 mode
    top = g.mode_index(g.nt)
    ref = max(max(float(np.max(np.abs(f))) for f in fields.values()), 1e-300)
    tail = 0.0 if g.nt == 0 else max(
        float(np.max(np.abs(f[:, top]))) for f in fields.values()) / ref
    return NormReport(np.asarray(xs), curves, sups, total, tail)


def boundary_norm(bd: BoundaryData, params: Params) -> float:
    """Composite norm of the boundary triple frozen at the station x0.

    (nu, mu, w) is measured exactly like a (u, v, omega) snapshot: the
    linear terms of the integral equations are controlled by this
    quantity, so the contraction ball is stated in terms of it.
    """
    g = bd.grid
    single = Grid(x0=params.x0, xmax=2.0 * params.x0, nx=2, L=g.L, ny=g.ny,
                  nt=g.nt)
    st = FlowState(single,
                   np.stack([bd.nu, bd.nu]),
                   np.stack([bd.mu, bd.mu]),
                   np.stack([bd.w, bd.w]))
    rep = composite_norm(st, params, station=0)
    return rep.total


def parity_defect(f, grid: Grid, parity: str) -> float:
    """Deviation of a lattice field from even/odd symmetry in y.

    Evenness in y is fhat(k) = fhat(-k) per mode; oddness flips sign.
    Returns the max absolute violation.
    """
    f = np.asarray(f, dtype=complex)
    flipped = f[..., grid.flip_k()]
    if parity == "even":
        return float(np.max(np.abs(f - flipped)))
    if parity == "odd":
        return float(np.max(np.abs(f + flipped)))
    raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
