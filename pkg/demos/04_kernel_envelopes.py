"""Sweep the kernel-norm envelope checks and tabulate the margins.

Everything the solver does rests on quantitative envelopes for its
convolution kernels: Lp norms, weighted norms, and derivative norms
bounded by explicit powers of x (times the worst-case mode decay rate
for the oscillating harmonics).  This script reconstructs each kernel
profile on adaptive grids across a sweep of x, fits the constant, and
reports the margin by which the ratio stays bounded in the last decade.

A negative margin would mean the measured norm outgrows its envelope:
the numerics disagreeing with the analysis.  None of them should --
a couple of closed-form norms are printed first as a calibration of
the reconstruction itself.

Run:  python3 demos/04_kernel_envelopes.py        (~10 s)
"""

import numpy as np

from farwake import Params
from farwake.verify import kernel_norm, run_all

# Calibration: these norms have textbook closed forms.
print("closed-form calibration of the profile reconstruction:")
for x in (0.5, 5.0, 50.0):
    got = kernel_norm("Kc", x, 0.0, np.inf)
    want = 1.0 / np.sqrt(4.0 * np.pi * x)
    print(f"  sup|Kc({x:4g})| = {got:.12f}   exact {want:.12f}")
got = kernel_norm("K0", 3.0, 0.0, 1)
print(f"  ||K0(3)||_1   = {got:.12f}   exact 1 (it is a probability "
      "density)")

params = Params(x0=20.0, strouhal=2.0)
checks = run_all(params, quick=True)

print(f"\n{len(checks)} envelope checks (quick sweep):")
print(f"{'check':16s} {'quantity':26s} {'envelope':24s} "
      f"{'C':>9s} {'margin':>8s}")
worst = min(checks, key=lambda c: c.margin)
for c in checks:
    flag = "  <-- tightest" if c is worst else ""
    print(f"{c.check_id:16s} {c.quantity:26s} {c.envelope:24s} "
          f"{c.fitted_c:9.3g} {c.margin:8.3f}{flag}")

npass = sum(c.passed for c in checks)
print(f"\n{npass}/{len(checks)} pass;"
      f" tightest margin {worst.margin:.3f} on {worst.check_id}")
