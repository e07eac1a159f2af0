"""Command-line driver: configuration, run orchestration, file formats.

The CLI reads a flat key = value configuration (everything also has a
default, so a bare ``farwake --mode solve`` works), runs one of five
pipelines, and writes bit-stable delimited text:

    solve           forward solve + snapshots + norms + coefficients
    linear-check    solve with sources disabled, compared against
                    direct kernel evaluation of the boundary data
    boundary-fit    recover inflow data from a measured cross-section
    extract         recompute the coefficient report from persisted
                    snapshots (bit-identical to the solve's report)
    verify-kernels  run the envelope-check suite and tabulate it

All floats are written with repr-exact precision (%.17g), so a
read-back reproduces the same doubles and downstream numbers are
bit-for-bit reproducible.  Exit codes: 0 ok, 2 config, 3 precondition,
4 convergence, 5 io.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import verify as verify_mod
from .asymptotics import a1_diagnostic, decay_fit, extract_coeffs, \
    shift_equivalence_check
from .duhamel import DuhamelEngine
from .errors import ConfigError, ConvergenceError, FarwakeError, \
    IOFormatError, PreconditionError
from .params import Grid, Params
from .solver import boundary_fit, make_boundary, picard_solve
from .spectral import to_physical
from .state import BoundaryData, composite_norm, boundary_norm

__all__ = ["RunConfig", "load_config", "parse_config_text", "run", "main",
           "resample_trace", "write_trace", "read_field_snapshot",
           "write_field_snapshot"]

MODES = ("solve", "boundary-fit", "extract", "verify-kernels", "linear-check")
FAMILIES = ("gaussian-wake", "symmetric-wake", "algebraic-tail")

_SCHEMA = "farwake v1"


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _parse_bool(s: str) -> bool:
    t = s.strip().lower()
    if t in ("true", "1", "yes", "on"):
        return True
    if t in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


@dataclass
class RunConfig:
    """Resolved run configuration (file keys mirror the field names)."""

    mode: str = "solve"
    out: str = "farwake-out"
    seed: int = 0
    family: str = "gaussian-wake"
    amplitude: float = 0.01
    snapshot_stride: int = 1
    fit_lo: float = 0.0          # 0 -> 4 x0
    fit_hi: float = 0.0          # 0 -> xmax
    trace: str = ""              # boundary-fit input cross-section
    snapshots: str = ""          # extract input directory
    verify_quick: bool = False
    quiet: bool = False
    params: Params = field(default_factory=Params)
    grid: Grid = field(default_factory=Grid)

    def fit_window(self) -> tuple[float, float]:
        lo = self.fit_lo if self.fit_lo > 0 else 4.0 * self.grid.x0
        hi = self.fit_hi if self.fit_hi > 0 else self.grid.xmax
        return lo, hi


_RUN_KEYS = {
    "mode": str, "out": str, "seed": int, "family": str,
    "amplitude": float, "snapshot_stride": int,
    "fit_lo": float, "fit_hi": float, "trace": str, "snapshots": str,
    "verify_quick": _parse_bool,
}
_PARAM_KEYS = {
    "p": float, "q": float, "r": float, "phi": float, "eta": float,
    "xi": float, "beta": float, "epsilon": float, "strouhal": float,
    "rho": float, "mean_tol": float, "window_tol": float,
    "picard_tol": float, "max_sweeps": int,
}
_GRID_KEYS = {"xmax": float, "nx": int, "L": float, "ny": int, "nt": int}
# x0 lives in both Params and Grid; one key sets both
_SHARED_KEYS = {"x0": float}


def parse_config_text(text: str, source: str = "<config>") -> RunConfig:
    """Parse key = value lines; unknown keys are rejected with the line."""
    run_vals: dict = {}
    pvals: dict = {}
    gvals: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', "
                              f"got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        try:
            if key in _RUN_KEYS:
                run_vals[key] = _RUN_KEYS[key](val)
            elif key in _PARAM_KEYS:
                pvals[key] = _PARAM_KEYS[key](val)
            elif key in _GRID_KEYS:
                gvals[key] = _GRID_KEYS[key](val)
            elif key in _SHARED_KEYS:
                x0 = _SHARED_KEYS[key](val)
                pvals["x0"] = x0
                gvals["x0"] = x0
            else:
                raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for "
                              f"{key!r}: {exc}") from exc
    try:
        params = Params(**pvals)
        grid = Grid(**gvals)
    except TypeError as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    cfg = RunConfig(params=params, grid=grid, **run_vals)
    _validate_config(cfg, source)
    return cfg


def _validate_config(cfg: RunConfig, source: str) -> None:
    if cfg.mode not in MODES:
        raise ConfigError(f"{source}: unknown mode {cfg.mode!r} "
                          f"(expected one of {', '.join(MODES)})")
    if cfg.family not in FAMILIES:
        raise ConfigError(f"{source}: unknown family {cfg.family!r} "
                          f"(expected one of {', '.join(FAMILIES)})")
    g = cfg.grid
    if g.ny < 8 or g.ny % 2:
        raise ConfigError(f"{source}: ny must be even and >= 8, got {g.ny}")
    if g.nx < 2 or g.nt < 0 or g.xmax <= g.x0 or g.L <= 0:
        raise ConfigError(f"{source}: bad grid: nx={g.nx} nt={g.nt} "
                          f"x0={g.x0} xmax={g.xmax} L={g.L}")
    if cfg.snapshot_stride < 1:
        raise ConfigError(f"{source}: snapshot_stride must be >= 1")
    if cfg.amplitude < 0:
        raise ConfigError(f"{source}: amplitude must be >= 0")
    # the analytic restriction checker runs at load time
    violations = cfg.params.check()
    if violations:
        raise ConfigError(f"{source}: parameter restrictions violated: "
                          + "; ".join(violations))


def load_config(path: str | Path) -> RunConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise IOFormatError(f"cannot read config {p}: {exc}") from exc
    return parse_config_text(text, source=str(p))


def _echo_lines(cfg: RunConfig) -> list[str]:
    lines = [f"# schema: farwake-config {_SCHEMA.split()[-1]}",
             "# resolved run configuration; readable as a config file"]
    for key in _RUN_KEYS:
        if key == "out":   # destination is not part of the run's identity
            continue
        lines.append(f"{key} = {_fmt(getattr(cfg, key))}")
    lines.append(f"x0 = {_fmt(cfg.grid.x0)}")
    for key in _PARAM_KEYS:
        lines.append(f"{key} = {_fmt(getattr(cfg.params, key))}")
    for key in _GRID_KEYS:
        lines.append(f"{key} = {_fmt(getattr(cfg.grid, key))}")
    return lines


# ---------------------------------------------------------------------------
# field snapshot formats


def write_field_snapshot(path: Path, arr: np.ndarray, grid: Grid,
                         meta: dict) -> None:
    """Spectral field as delimited text with columns n, k_index, re, im."""
    arr = np.asarray(arr)
    rows = ["# farwake-field v1"]
    for key in sorted(meta):
        rows.append(f"# {key} = {_fmt(meta[key])}")
    rows.append("n\tk_index\tre\tim")
    for mi, n in enumerate(grid.modes):
        col = arr[mi]
        for j in range(grid.ny):
            rows.append(f"{n}\t{j}\t{_fmt(col[j].real)}\t{_fmt(col[j].imag)}")
    path.write_text("\n".join(rows) + "\n")


def read_field_snapshot(path: Path, grid: Grid) -> np.ndarray:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise IOFormatError(f"cannot read snapshot {path}: {exc}") from exc
    lines = text.splitlines()
    if not lines or lines[0] != "# farwake-field v1":
        raise IOFormatError(f"{path}: not a farwake-field v1 file")
    out = np.zeros((grid.nmodes, grid.ny), dtype=complex)
    seen = 0
    for line in lines[1:]:
        if line.startswith("#") or line.startswith("n\t") or not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 4:
            raise IOFormatError(f"{path}: bad row {line!r}")
        try:
            n, j = int(parts[0]), int(parts[1])
            out[grid.mode_index(n), j] = float(parts[2]) + 1j * float(parts[3])
        except (ValueError, IndexError) as exc:
            raise IOFormatError(f"{path}: bad row {line!r}: {exc}") from exc
        seen += 1
    if seen != grid.nmodes * grid.ny:
        raise IOFormatError(f"{path}: expected {grid.nmodes * grid.ny} rows, "
                            f"got {seen}")
    return out


def _write_physical_companion(path: Path, arr: np.ndarray, grid: Grid,
                              meta: dict) -> None:
    phys = to_physical(arr, grid.L)
    rows = ["# farwake-field-physical v1"]
    for key in sorted(meta):
        rows.append(f"# {key} = {_fmt(meta[key])}")
    rows.append("n\tj\ty\tre\tim")
    for mi, n in enumerate(grid.modes):
        col = phys[mi]
        for j in range(grid.ny):
            rows.append(f"{n}\t{j}\t{_fmt(grid.y[j])}\t"
                        f"{_fmt(col[j].real)}\t{_fmt(col[j].imag)}")
    path.write_text("\n".join(rows) + "\n")


def _write_boundary(path: Path, bd: BoundaryData, grid: Grid) -> None:
    rows = ["# farwake-boundary v1", "func\tn\tk_index\tre\tim"]
    for name, arr in (("w", bd.w), ("nu", bd.nu), ("mu", bd.mu)):
        a = np.asarray(arr)
        for mi, n in enumerate(grid.modes):
            for j in range(grid.ny):
                rows.append(f"{name}\t{n}\t{j}\t{_fmt(a[mi, j].real)}\t"
                            f"{_fmt(a[mi, j].imag)}")
    path.write_text("\n".join(rows) + "\n")


def _read_boundary(path: Path, grid: Grid) -> BoundaryData:
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise IOFormatError(f"cannot read boundary {path}: {exc}") from exc
    if not lines or lines[0] != "# farwake-boundary v1":
        raise IOFormatError(f"{path}: not a farwake-boundary v1 file")
    parts = {"w": np.zeros((grid.nmodes, grid.ny), dtype=complex),
             "nu": np.zeros((grid.nmodes, grid.ny), dtype=complex),
             "mu": np.zeros((grid.nmodes, grid.ny), dtype=complex)}
    for line in lines[1:]:
        if line.startswith("#") or line.startswith("func\t") or not line.strip():
            continue
        f = line.split("\t")
        if len(f) != 5 or f[0] not in parts:
            raise IOFormatError(f"{path}: bad row {line!r}")
        parts[f[0]][grid.mode_index(int(f[1])), int(f[2])] = \
            float(f[3]) + 1j * float(f[4])
    return BoundaryData(grid=grid, w=parts["w"], nu=parts["nu"],
                        mu=parts["mu"])


def _write_norms_csv(path: Path, state, params: Params) -> None:
    rep = composite_norm(state, params)
    names = list(rep.per_station)
    rows = ["station,x," + ",".join(names)]
    for i, x in enumerate(rep.stations):
        vals = ",".join(_fmt(rep.per_station[nm][i]) for nm in names)
        rows.append(f"{i},{_fmt(x)},{vals}")
    path.write_text("\n".join(rows) + "\n")


def _coeff_lines(co, rows, diag, shift) -> list[str]:
    out = ["# farwake-coeffs v1"]

    def put(key, val):
        out.append(f"{key} = {_fmt(val)}")

    put("a1", co.a1)
    for mi, n in enumerate(range(-(len(co.a2) // 2), len(co.a2) // 2 + 1)):
        put(f"a2_n{n}_re", co.a2[mi].real)
        put(f"a2_n{n}_im", co.a2[mi].imag)
        put(f"a3_n{n}_re", co.a3[mi].real)
        put(f"a3_n{n}_im", co.a3[mi].imag)
    put("a4", co.a4)
    put("a4_fit", co.a4_fit)
    put("a5", co.a5)
    put("a6", co.a6)
    put("a6_fit", co.a6_fit)
    put("a13", co.a13)
    for key in sorted(co.a8):
        put(f"a8_{key}", co.a8[key])
    for key in sorted(co.pieces):
        put(f"piece_{key}", co.pieces[key])
    put("atilde1_mean", diag["mean"])
    put("atilde1_variation", diag["variation"])
    put("atilde1_cross_defect",
        abs(diag["mean"] + co.a1) / max(abs(co.a1), 1e-300))
    for row in rows:
        put(f"decay_{row.quantity}_slope", row.slope)
        put(f"decay_{row.quantity}_target", row.target)
        put(f"decay_{row.quantity}_gate", row.gate)
        put(f"decay_{row.quantity}_pass", bool(row.passed))
        put(f"decay_{row.quantity}_gated", bool(row.gated))
    put("shift_equivalence", shift)
    return out


def _write_verify_table(path: Path, checks) -> None:
    rows = ["# farwake-verify v1",
            "check_id\tquantity\tenvelope\tfitted_c\tmargin\tpass"]
    for c in checks:
        rows.append(f"{c.check_id}\t{c.quantity}\t{c.envelope}\t"
                    f"{_fmt(c.fitted_c)}\t{_fmt(c.margin)}\t"
                    f"{_fmt(c.passed)}")
    path.write_text("\n".join(rows) + "\n")


# ---------------------------------------------------------------------------
# cross-section traces


def write_trace(path: Path, grid: Grid, u: np.ndarray, v: np.ndarray,
                omega: np.ndarray) -> None:
    """Physical-space cross-section file (columns y, then per mode and
    per field u, v, omega the re/im pair)."""
    cols = [np.asarray(grid.y, dtype=float)]
    names = ["y"]
    pu, pv, pw = (to_physical(np.asarray(a), grid.L) for a in (u, v, omega))
    for mi, n in enumerate(grid.modes):
        for fname, phys in (("u", pu), ("v", pv), ("omega", pw)):
            cols.append(phys[mi].real)
            cols.append(phys[mi].imag)
            names.append(f"{fname}_n{n}_re")
            names.append(f"{fname}_n{n}_im")
    rows = ["# farwake-trace v1", f"# nt = {grid.nt}", "\t".join(names)]
    for j in range(grid.ny):
        rows.append("\t".join(_fmt(c[j]) for c in cols))
    Path(path).write_text("\n".join(rows) + "\n")


def resample_trace(path: str | Path, grid: Grid):
    """Band-limited resampling of an external cross-section file.

    Returns {"u", "v", "omega"} as spectral (nmodes, ny) arrays plus
    "residual", the relative misfit of the band-limited model on the
    input samples.  The input must be monotone in y and span at least
    the grid half-width L; data in the outer 15% of the domain is
    cosine-tapered so a non-periodic trace does not ring.
    """
    p = Path(path)
    try:
        lines = p.read_text().splitlines()
    except OSError as exc:
        raise IOFormatError(f"cannot read trace {p}: {exc}") from exc
    if not lines or lines[0] != "# farwake-trace v1":
        raise IOFormatError(f"{p}: not a farwake-trace v1 file")
    nt = None
    data_rows = []
    for line in lines[1:]:
        if line.startswith("#"):
            if "nt =" in line:
                nt = int(line.split("=", 1)[1])
            continue
        if line.startswith("y\t") or not line.strip():
            continue
        try:
            data_rows.append([float(tok) for tok in line.split("\t")])
        except ValueError as exc:
            raise IOFormatError(f"{p}: bad trace row {line!r}: {exc}") from exc
    if nt is None:
        raise IOFormatError(f"{p}: missing '# nt =' header")
    if nt != grid.nt:
        raise IOFormatError(f"{p}: trace has nt = {nt}, grid expects "
                            f"{grid.nt}")
    want = 1 + grid.nmodes * 6
    mat = np.asarray(data_rows, dtype=float)
    if mat.ndim != 2 or mat.shape[1] != want:
        raise IOFormatError(f"{p}: expected {want} columns")
    y_in = mat[:, 0]
    if np.any(np.diff(y_in) <= 0):
        raise PreconditionError("trace y-samples must be strictly increasing")
    span = y_in[-1] - y_in[0]
    if span < grid.L:
        raise PreconditionError(
            f"trace spans {span:.3g} but the grid needs at least "
            f"L = {grid.L:.3g} of decaying support")

    raw = mat[:, 1::2] + 1j * mat[:, 2::2]   # (nsamp, 3*nmodes)

    on_grid = (y_in.size == grid.ny
               and float(np.max(np.abs(y_in - grid.y))) <= 1e-9 * grid.L)
    if on_grid:
        phys = raw.T.copy()
        residual = 0.0
    else:
        keep = np.abs(y_in) <= grid.L
        ys, d = y_in[keep], raw[keep]
        taper = np.ones_like(ys)
        outer = np.abs(ys) > 0.85 * grid.L
        t = (np.abs(ys[outer]) - 0.85 * grid.L) / (0.15 * grid.L)
        taper[outer] = np.cos(np.pi * t / 2.0) ** 2
        d = d * taper[:, None]
        dy_max = float(np.max(np.diff(ys)))
        mmax = min(int(0.9 * grid.L / dy_max), grid.ny // 2 - 1)
        ks = np.pi * np.arange(-mmax, mmax + 1) / grid.L
        a = np.exp(1j * ys[:, None] * ks[None, :])
        coef, *_ = np.linalg.lstsq(a, d, rcond=None)
        misfit = float(np.linalg.norm(a @ coef - d))
        scale = max(float(np.linalg.norm(d)), 1e-300)
        residual = misfit / scale
        b = np.exp(1j * grid.y[:, None] * ks[None, :])
        phys = (b @ coef).T

    from .spectral import to_spectral
    out = {}
    for fi, name in enumerate(("u", "v", "omega")):
        block = phys.reshape(grid.nmodes, 3, grid.ny)[:, fi]
        out[name] = to_spectral(block, grid.L)
    out["residual"] = residual
    return out


# ---------------------------------------------------------------------------
# pipelines


def _say(cfg: RunConfig, msg: str) -> None:
    if not cfg.quiet:
        print(msg)


def _write_state(outd: Path, cfg: RunConfig, state) -> int:
    grid = cfg.grid
    written = 0
    for i in range(0, grid.nx, cfg.snapshot_stride):
        for fname, arr in (("omega", state.omega), ("u", state.u),
                           ("v", state.v)):
            meta = {"field": fname, "station": i, "x": grid.x[i]}
            write_field_snapshot(outd / f"station_{i:03d}_{fname}.tsv",
                                 arr[i], grid, meta)
            _write_physical_companion(outd / f"station_{i:03d}_{fname}_y.tsv",
                                      arr[i], grid, meta)
            written += 2
    return written


def _coeff_report(cfg: RunConfig, state, bd) -> list[str]:
    window = cfg.fit_window()
    co = extract_coeffs(state, bd, cfg.params, fit_window=window)
    rows = decay_fit(state, co, cfg.params, window=window)
    diag = a1_diagnostic(state, cfg.params)
    shift = shift_equivalence_check(co, cfg.grid, window=window)
    return _coeff_lines(co, rows, diag, shift)


def _run_solve(cfg: RunConfig, linear: bool = False) -> None:
    outd = Path(cfg.out)
    outd.mkdir(parents=True, exist_ok=True)
    bd = make_boundary(cfg.family, cfg.grid, cfg.params,
                       amp=cfg.amplitude, seed=cfg.seed)
    engine = DuhamelEngine(cfg.grid, cfg.params)
    state, info = picard_solve(bd, cfg.params, engine=engine, linear=linear)
    (outd / "config_echo.txt").write_text("\n".join(_echo_lines(cfg)) + "\n")
    _write_boundary(outd / "boundary.tsv", bd, cfg.grid)
    nfiles = _write_state(outd, cfg, state)
    _write_norms_csv(outd / "norms.csv", state, cfg.params)

    run_lines = ["# farwake-run v1",
                 f"mode = {'linear-check' if linear else 'solve'}",
                 f"sweeps = {info['sweeps']}",
                 f"converged = {_fmt(info['converged'])}",
                 f"noncontractive = {_fmt(info['noncontractive'])}",
                 f"norm_total = {_fmt(info['norm'].total)}",
                 f"boundary_norm = {_fmt(boundary_norm(bd, cfg.params))}"]
    for i, inc in enumerate(info["increments"], start=1):
        run_lines.append(f"increment_{i} = {_fmt(inc)}")
    (outd / "run_info.txt").write_text("\n".join(run_lines) + "\n")

    if linear:
        direct = engine.boundary_fields(bd)
        scale = max(float(np.max(np.abs(direct.u))),
                    float(np.max(np.abs(direct.v))),
                    float(np.max(np.abs(direct.omega))), 1e-300)
        dev = max(float(np.max(np.abs(state.u - direct.u))),
                  float(np.max(np.abs(state.v - direct.v))),
                  float(np.max(np.abs(state.omega - direct.omega)))) / scale
        (outd / "linear_report.txt").write_text(
            "# farwake-linear-check v1\n"
            f"max_rel_deviation = {_fmt(dev)}\n"
            f"field_scale = {_fmt(scale)}\n")
        _say(cfg, f"linear-check: {info['sweeps']} sweeps, "
                  f"deviation {dev:.3e}, {nfiles} snapshot files")
    else:
        report = _coeff_report(cfg, state, bd)
        (outd / "coeffs.txt").write_text("\n".join(report) + "\n")
        _say(cfg, f"solve: {info['sweeps']} sweeps, converged="
                  f"{info['converged']}, norm {info['norm'].total:.6g}, "
                  f"{nfiles} snapshot files -> {outd}")


def _run_extract(cfg: RunConfig) -> None:
    if not cfg.snapshots:
        raise ConfigError("extract mode needs 'snapshots = DIR' "
                          "(a previous solve output directory)")
    src = Path(cfg.snapshots)
    echo = load_config(src / "config_echo.txt")
    if echo.snapshot_stride != 1:
        raise IOFormatError("extract needs stride-1 snapshots; "
                            f"{src} was written with stride "
                            f"{echo.snapshot_stride}")
    grid = echo.grid
    bd = _read_boundary(src / "boundary.tsv", grid)
    from .state import FlowState
    state = FlowState.zeros(grid)
    for i in range(grid.nx):
        for fname in ("omega", "u", "v"):
            arr = read_field_snapshot(src / f"station_{i:03d}_{fname}.tsv",
                                      grid)
            getattr(state, fname)[i] = arr
    cfg2 = replace(cfg, params=echo.params, grid=grid,
                   fit_lo=echo.fit_lo, fit_hi=echo.fit_hi)
    report = _coeff_report(cfg2, state, bd)
    outd = Path(cfg.out)
    outd.mkdir(parents=True, exist_ok=True)
    (outd / "coeffs.txt").write_text("\n".join(report) + "\n")
    _say(cfg, f"extract: coefficients from {grid.nx} stations -> "
              f"{outd / 'coeffs.txt'}")


def _run_boundary_fit(cfg: RunConfig) -> None:
    if not cfg.trace:
        raise ConfigError("boundary-fit mode needs 'trace = FILE' "
                          "(a cross-section in farwake-trace format)")
    traces = resample_trace(cfg.trace, cfg.grid)
    engine = DuhamelEngine(cfg.grid, cfg.params)
    bd, state, fit = boundary_fit(traces["omega"], traces["u"],
                                  cfg.params, cfg.grid, engine=engine)
    outd = Path(cfg.out)
    outd.mkdir(parents=True, exist_ok=True)
    (outd / "config_echo.txt").write_text("\n".join(_echo_lines(cfg)) + "\n")
    _write_boundary(outd / "boundary.tsv", bd, cfg.grid)
    _write_state(outd, cfg, state)
    v_in = traces["v"]
    scale = max(float(np.max(np.abs(v_in))), 1e-300)
    v_trace_defect = float(np.max(np.abs(state.v[0] - v_in))) / scale
    lines = ["# farwake-fit v1",
             f"outer_iterations = {fit['outer_iterations']}",
             f"v_defect = {_fmt(fit['v_defect'])}",
             f"v_trace_defect = {_fmt(v_trace_defect)}",
             f"interp_residual = {_fmt(traces['residual'])}"]
    for i, d in enumerate(fit["defects"], start=1):
        lines.append(f"defect_{i} = {_fmt(d)}")
    (outd / "fit_report.txt").write_text("\n".join(lines) + "\n")
    _say(cfg, f"boundary-fit: {fit['outer_iterations']} outer iterations, "
              f"v-defect {fit['v_defect']:.3e} -> {outd}")


def _run_verify(cfg: RunConfig) -> None:
    checks = verify_mod.run_all(cfg.params, quick=cfg.verify_quick)
    outd = Path(cfg.out)
    outd.mkdir(parents=True, exist_ok=True)
    _write_verify_table(outd / "verify.tsv", checks)
    npass = sum(c.passed for c in checks)
    _say(cfg, f"verify-kernels: {npass}/{len(checks)} checks pass -> "
              f"{outd / 'verify.tsv'}")


def run(cfg: RunConfig) -> None:
    """Execute the configured pipeline (raises on failure)."""
    if cfg.mode == "solve":
        _run_solve(cfg)
    elif cfg.mode == "linear-check":
        _run_solve(cfg, linear=True)
    elif cfg.mode == "extract":
        _run_extract(cfg)
    elif cfg.mode == "boundary-fit":
        _run_boundary_fit(cfg)
    elif cfg.mode == "verify-kernels":
        _run_verify(cfg)
    else:  # pragma: no cover - guarded at config load
        raise ConfigError(f"unknown mode {cfg.mode!r}")


def _argparser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="farwake",
        description="Spectral far-wake solver: forward solves, boundary "
                    "fitting, coefficient extraction, kernel verification.")
    ap.add_argument("--config", metavar="PATH",
                    help="key = value configuration file")
    ap.add_argument("--mode", metavar="NAME", choices=MODES,
                    help="pipeline to run (overrides the config file)")
    ap.add_argument("--out", metavar="DIR", help="output directory")
    ap.add_argument("--seed", metavar="N", type=int,
                    help="random seed for the boundary family")
    ap.add_argument("--quiet", action="store_true",
                    help="suppress progress output")
    return ap


def main(argv=None) -> int:
    args = _argparser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else RunConfig()
        if args.mode:
            cfg = replace(cfg, mode=args.mode)
        if args.out:
            cfg = replace(cfg, out=args.out)
        if args.seed is not None:
            cfg = replace(cfg, seed=args.seed)
        if args.quiet:
            cfg = replace(cfg, quiet=True)
        _validate_config(cfg, "<cli>")
        run(cfg)
    except ConfigError as exc:
        print(f"farwake: error class=config: {exc}", file=sys.stderr)
        return 2
    except PreconditionError as exc:
        print(f"farwake: error class=precondition: {exc}", file=sys.stderr)
        return 3
    except ConvergenceError as exc:
        print(f"farwake: error class=convergence: {exc}", file=sys.stderr)
        return 4
    except (IOFormatError, OSError) as exc:
        print(f"farwake: error class=io: {exc}", file=sys.stderr)
        return 5
    except FarwakeError as exc:  # pragma: no cover - safety net
        print(f"farwake: error class=precondition: {exc}", file=sys.stderr)
        return 3
    return 0
