"""Configuration parsing, file formats, and the five pipelines.

Every float is persisted with %.17g, so read-backs reproduce the same
doubles and repeated runs are byte-for-byte identical; several tests
below assert that literally.
"""

import numpy as np
import numpy.testing as npt
import pytest

from farwake import Grid, Params
from farwake.cli import (main, load_config, parse_config_text,
                         read_field_snapshot, resample_trace, write_trace,
                         write_field_snapshot)
from farwake.errors import ConfigError, IOFormatError, PreconditionError
from farwake import spectral as sp


TINY = """\
x0 = 20
xmax = 200
nx = 16
L = 100
ny = 64
nt = 1
amplitude = 0.01
seed = 1
"""


def _cfg_file(tmp_path, text=TINY, name="cfg.txt"):
    p = tmp_path / name
    p.write_text(text)
    return p


# --------------------------------------------------------------- config file

def test_parse_defaults():
    cfg = parse_config_text("")
    assert cfg.mode == "solve"
    assert cfg.family == "gaussian-wake"
    assert cfg.seed == 0
    assert cfg.params.check() == []


def test_parse_values_comments_and_shared_x0():
    cfg = parse_config_text(
        "mode = extract   # trailing comment\n"
        "\n"
        "# full-line comment\n"
        "x0 = 35.5\n"
        "seed = 7\n"
        "verify_quick = true\n")
    assert cfg.mode == "extract"
    assert cfg.seed == 7
    assert cfg.verify_quick is True
    assert cfg.params.x0 == 35.5 and cfg.grid.x0 == 35.5


def test_parse_errors_carry_line_numbers():
    with pytest.raises(ConfigError, match=r"<config>:3: unknown key"):
        parse_config_text("x0 = 20\n\nbogus_key = 1\n")
    with pytest.raises(ConfigError, match=r"<config>:2: bad value"):
        parse_config_text("x0 = 20\nseed = huh\n")
    with pytest.raises(ConfigError, match=r"<config>:1: expected"):
        parse_config_text("just some words\n")


@pytest.mark.parametrize("line,match", [
    ("mode = dance", "unknown mode"),
    ("family = plume", "unknown family"),
    ("ny = 63", "bad grid sizes"),
    ("ny = 6", "ny must be even"),
    ("nx = 1", "bad grid"),
    ("snapshot_stride = 0", "snapshot_stride"),
    ("amplitude = -1", "amplitude"),
    ("beta = 5.0", "restrictions violated"),
])
def test_validation_rejections(line, match):
    with pytest.raises(ConfigError, match=match):
        parse_config_text(line + "\n")


def test_load_config_missing_file(tmp_path):
    with pytest.raises(IOFormatError, match="cannot read config"):
        load_config(tmp_path / "nope.txt")


# ------------------------------------------------------------- file formats

def test_field_snapshot_round_trip_is_exact(tmp_path):
    g = Grid(x0=20.0, xmax=200.0, nx=4, L=50.0, ny=32, nt=1)
    rng = np.random.default_rng(11)
    arr = rng.standard_normal((g.nmodes, g.ny)) \
        + 1j * rng.standard_normal((g.nmodes, g.ny))
    p = tmp_path / "snap.tsv"
    write_field_snapshot(p, arr, g, {"field": "u", "x": 21.5})
    back = read_field_snapshot(p, g)
    assert np.array_equal(back, arr)      # %.17g round-trips doubles


def test_field_snapshot_rejects_bad_files(tmp_path):
    g = Grid(x0=20.0, xmax=200.0, nx=4, L=50.0, ny=32, nt=1)
    p = tmp_path / "bad.tsv"
    p.write_text("not a snapshot\n")
    with pytest.raises(IOFormatError, match="not a farwake-field"):
        read_field_snapshot(p, g)
    p.write_text("# farwake-field v1\nn\tk_index\tre\tim\n0\t0\t1.0\t0.0\n")
    with pytest.raises(IOFormatError, match="expected"):
        read_field_snapshot(p, g)       # truncated
    with pytest.raises(IOFormatError, match="cannot read"):
        read_field_snapshot(tmp_path / "missing.tsv", g)


def test_trace_round_trip_on_grid(tmp_path):
    g = Grid(x0=20.0, xmax=200.0, nx=4, L=60.0, ny=64, nt=1)
    rng = np.random.default_rng(3)
    fields = []
    for _ in range(3):
        f = rng.standard_normal((g.nmodes, g.ny)) \
            + 1j * rng.standard_normal((g.nmodes, g.ny))
        f *= np.exp(-np.abs(g.k))          # something smooth
        fields.append(f)
    p = tmp_path / "trace.tsv"
    write_trace(p, g, *fields)
    out = resample_trace(p, g)
    assert out["residual"] == 0.0           # grid match is detected
    for name, f in zip(("u", "v", "omega"), fields):
        npt.assert_allclose(out[name], f, atol=1e-13)


def test_trace_resamples_finer_gaussian(tmp_path):
    # an off-grid trace at 3x density reconstructs a band-limited
    # profile to near round-off
    g = Grid(x0=20.0, xmax=200.0, nx=4, L=60.0, ny=64, nt=1)
    fine = Grid(x0=20.0, xmax=200.0, nx=4, L=60.0, ny=192, nt=1)
    # wide enough that the coarse grid's k-band holds the whole spectrum
    prof = np.exp(-(fine.y / 7.0) ** 2)
    f = np.tile(sp.to_spectral(prof, fine.L), (fine.nmodes, 1))
    p = tmp_path / "fine.tsv"
    write_trace(p, fine, f, 0.5 * f, -2.0 * f)
    out = resample_trace(p, g)
    assert out["residual"] < 1e-10
    want = np.tile(sp.to_spectral(np.exp(-(g.y / 7.0) ** 2), g.L),
                   (g.nmodes, 1))
    npt.assert_allclose(out["u"], want, atol=1e-10)
    npt.assert_allclose(out["omega"], -2.0 * want, atol=1e-10)


def test_trace_error_paths(tmp_path):
    g = Grid(x0=20.0, xmax=200.0, nx=4, L=60.0, ny=64, nt=1)
    p = tmp_path / "t.tsv"
    p.write_text("wrong header\n")
    with pytest.raises(IOFormatError, match="not a farwake-trace"):
        resample_trace(p, g)
    p.write_text("# farwake-trace v1\ny\tstuff\n")
    with pytest.raises(IOFormatError, match="missing '# nt"):
        resample_trace(p, g)
    p.write_text("# farwake-trace v1\n# nt = 3\ny\tstuff\n")
    with pytest.raises(IOFormatError, match="trace has nt = 3"):
        resample_trace(p, g)
    # right header, wrong column count
    p.write_text("# farwake-trace v1\n# nt = 1\n1.0\t2.0\n")
    with pytest.raises(IOFormatError, match="columns"):
        resample_trace(p, g)
    # non-numeric junk inside a data row
    p.write_text("# farwake-trace v1\n# nt = 1\n1.0\thello\n")
    with pytest.raises(IOFormatError, match="bad trace row"):
        resample_trace(p, g)
    # span shorter than the grid half-width
    small = Grid(x0=20.0, xmax=200.0, nx=4, L=10.0, ny=16, nt=0)
    write_trace(p, small, np.zeros((1, 16), complex),
                np.zeros((1, 16), complex), np.zeros((1, 16), complex))
    with pytest.raises(PreconditionError, match="spans"):
        resample_trace(p, g.__class__(x0=20.0, xmax=200.0, nx=4,
                                      L=100.0, ny=16, nt=0))


# ---------------------------------------------------------------- pipelines

def test_solve_pipeline_outputs(tmp_path):
    cfg = _cfg_file(tmp_path)
    out = tmp_path / "out"
    rc = main(["--config", str(cfg), "--out", str(out), "--quiet"])
    assert rc == 0
    for name in ("config_echo.txt", "boundary.tsv", "norms.csv",
                 "run_info.txt", "coeffs.txt"):
        assert (out / name).exists(), name
    # stride-1 snapshots: nx stations x 3 fields x (spectral + physical)
    assert len(list(out.glob("station_*_*.tsv"))) == 16 * 3 * 2
    info = (out / "run_info.txt").read_text()
    assert "converged = true" in info
    # the echo is itself a loadable config describing the same run
    echo = load_config(out / "config_echo.txt")
    assert echo.seed == 1 and echo.grid.ny == 64


def test_repeat_runs_are_byte_identical(tmp_path):
    cfg = _cfg_file(tmp_path)
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["--config", str(cfg), "--out", str(out1), "--quiet"]) == 0
    assert main(["--config", str(cfg), "--out", str(out2), "--quiet"]) == 0
    for name in ("coeffs.txt", "norms.csv", "boundary.tsv",
                 "station_007_omega.tsv", "run_info.txt"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes(), name


def test_extract_reproduces_solve_report(tmp_path):
    cfg = _cfg_file(tmp_path)
    out1 = tmp_path / "solve"
    assert main(["--config", str(cfg), "--out", str(out1), "--quiet"]) == 0
    ex_cfg = _cfg_file(tmp_path, TINY + f"mode = extract\n"
                       f"snapshots = {out1}\n", name="ex.txt")
    out2 = tmp_path / "extract"
    assert main(["--config", str(ex_cfg), "--out", str(out2), "--quiet"]) == 0
    assert (out1 / "coeffs.txt").read_bytes() \
        == (out2 / "coeffs.txt").read_bytes()


def test_linear_check_zero_sources(tmp_path):
    cfg = _cfg_file(tmp_path)
    out = tmp_path / "lin"
    rc = main(["--config", str(cfg), "--mode", "linear-check",
               "--out", str(out), "--quiet"])
    assert rc == 0
    rep = dict(line.split(" = ") for line in
               (out / "linear_report.txt").read_text().splitlines()
               if " = " in line)
    assert float(rep["max_rel_deviation"]) < 1e-12


def test_verify_pipeline_table(tmp_path):
    cfg = _cfg_file(tmp_path, TINY + "mode = verify-kernels\n"
                    "verify_quick = true\n", name="v.txt")
    out = tmp_path / "ver"
    assert main(["--config", str(cfg), "--out", str(out), "--quiet"]) == 0
    lines = (out / "verify.tsv").read_text().splitlines()
    assert lines[0] == "# farwake-verify v1"
    body = [l for l in lines[2:] if l.strip()]
    assert len(body) >= 90
    assert all(l.split("\t")[5] == "true" for l in body)


def test_boundary_fit_pipeline_round_trip(tmp_path):
    # solve, dump the inflow cross-section, re-fit from it
    cfg = _cfg_file(tmp_path)
    out1 = tmp_path / "fwd"
    assert main(["--config", str(cfg), "--out", str(out1), "--quiet"]) == 0
    run_cfg = load_config(out1 / "config_echo.txt")
    g = run_cfg.grid
    u0 = read_field_snapshot(out1 / "station_000_u.tsv", g)
    v0 = read_field_snapshot(out1 / "station_000_v.tsv", g)
    w0 = read_field_snapshot(out1 / "station_000_omega.tsv", g)
    trace = tmp_path / "trace.tsv"
    write_trace(trace, g, u0, v0, w0)
    fit_cfg = _cfg_file(tmp_path, TINY + f"mode = boundary-fit\n"
                        f"trace = {trace}\n", name="fit.txt")
    out2 = tmp_path / "fit"
    assert main(["--config", str(fit_cfg), "--out", str(out2),
                 "--quiet"]) == 0
    rep = dict(line.split(" = ") for line in
               (out2 / "fit_report.txt").read_text().splitlines()
               if " = " in line)
    assert float(rep["v_defect"]) < 1e-8
    assert float(rep["v_trace_defect"]) < 1e-6
    # recovered inflow matches the one the solve used
    b1 = (out1 / "boundary.tsv").read_text().splitlines()
    b2 = (out2 / "boundary.tsv").read_text().splitlines()
    assert b1[0] == b2[0] == "# farwake-boundary v1"


# --------------------------------------------------------------- exit codes

def test_exit_code_config_error(tmp_path):
    cfg = _cfg_file(tmp_path, "mode = dance\n")
    assert main(["--config", str(cfg), "--quiet"]) == 2
    # extract without snapshots is also a config problem
    cfg = _cfg_file(tmp_path, TINY + "mode = extract\n", name="e.txt")
    assert main(["--config", str(cfg), "--out", str(tmp_path / "x"),
                 "--quiet"]) == 2


def test_exit_code_precondition(tmp_path):
    # a trace whose support is too narrow for the requested grid
    small = Grid(x0=20.0, xmax=200.0, nx=4, L=10.0, ny=16, nt=1)
    trace = tmp_path / "narrow.tsv"
    z = np.zeros((small.nmodes, small.ny), complex)
    write_trace(trace, small, z, z, z)
    cfg = _cfg_file(tmp_path, TINY + f"mode = boundary-fit\n"
                    f"trace = {trace}\n", name="p.txt")
    assert main(["--config", str(cfg), "--out", str(tmp_path / "x"),
                 "--quiet"]) == 3


def test_exit_code_convergence(tmp_path):
    cfg = _cfg_file(tmp_path, TINY.replace("amplitude = 0.01",
                                           "amplitude = 25.0"), name="c.txt")
    assert main(["--config", str(cfg), "--out", str(tmp_path / "x"),
                 "--quiet"]) == 4


def test_exit_code_io(tmp_path):
    assert main(["--config", str(tmp_path / "missing.txt")]) == 5
    cfg = _cfg_file(tmp_path, TINY + "mode = extract\n"
                    f"snapshots = {tmp_path / 'nodir'}\n", name="io.txt")
    assert main(["--config", str(cfg), "--out", str(tmp_path / "x"),
                 "--quiet"]) == 5


def test_cli_flag_overrides(tmp_path):
    cfg = _cfg_file(tmp_path)
    out = tmp_path / "seeded"
    assert main(["--config", str(cfg), "--out", str(out), "--seed", "9",
                 "--quiet"]) == 0
    echo = load_config(out / "config_echo.txt")
    assert echo.seed == 9
