"""How hard can you push the wake before the iteration lets go?

The solver is a fixed-point iteration whose correction terms are
quadratic in the state.  Two things follow, and this script shows both
on a small grid:

 * the first Picard ratio (second increment over first) grows linearly
   with the inflow amplitude -- double the wake deficit, double the
   contraction factor;
 * past a critical amplitude the map stops contracting and the solver
   refuses, raising NonContractiveError instead of returning garbage.

The scan also prints the quadratic range gain: the relative distance
between the converged state and the linear solution (quadratic sources
switched off) scales like the amplitude itself, the signature of a
genuinely second-order correction.

Run:  python3 demos/05_contraction_scan.py        (~10 s)
"""

import numpy as np

from farwake import (DuhamelEngine, FlowState, Grid, Params, composite_norm,
                     make_boundary, picard_solve)
from farwake.errors import NonContractiveError

params = Params(x0=20.0, strouhal=2.0)
grid = Grid(x0=20.0, xmax=400.0, nx=48, L=200.0, ny=128, nt=1)
engine = DuhamelEngine(grid, params)

print(f"{'amplitude':>10s} {'sweeps':>7s} {'ratio_1':>10s} "
      f"{'nonlinear part':>15s}")
ratios = {}
for amp in (0.005, 0.01, 0.02, 0.04):
    bd = make_boundary("gaussian-wake", grid, params, amp=amp, seed=3)
    state, info = picard_solve(bd, params, engine=engine)
    inc = np.asarray(info["increments"])
    ratio = inc[1] / inc[0]
    ratios[amp] = ratio

    # Same data with the quadratic sources switched off: the gap to the
    # converged state is the nonlinear correction.
    lin, _ = picard_solve(bd, params, engine=engine, linear=True)
    diff = FlowState(grid, state.u - lin.u, state.v - lin.v,
                     state.omega - lin.omega)
    rel = (composite_norm(diff, params).total
           / composite_norm(state, params).total)
    print(f"{amp:10.3f} {info['sweeps']:7d} {ratio:10.2e} {rel:15.2e}")

print("\nratio growth when amplitude doubles (should be ~2x):")
amps = sorted(ratios)
for lo, hi in zip(amps, amps[1:]):
    print(f"  {hi:.3f}/{lo:.3f}: {ratios[hi] / ratios[lo]:.3f}x")

big = 25.0
print(f"\namplitude {big}:")
bd = make_boundary("gaussian-wake", grid, params, amp=big, seed=3)
try:
    picard_solve(bd, params, engine=engine)
except NonContractiveError as exc:
    print(f"  NonContractiveError: {exc}")
else:
    print("  unexpectedly converged -- the smallness condition is not "
          "sharp on this grid")
