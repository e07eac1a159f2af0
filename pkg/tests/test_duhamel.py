"""Product-integration sweeps and the field-assembly engine.

panel_weights is exact for affine integrands by construction, so the
sweeps must reproduce closed-form integrals of piecewise-linear data to
rounding — including in the stiff regime where naive quadrature of
e^{lam dx} with lam dx ~ -100 would be useless.
"""

import numpy as np
import numpy.testing as npt
import pytest

from farwake import Params, Grid, make_boundary
from farwake.kernels import Dispersion, symbol, multiplier, apply_Lu
from farwake.quads import QuadFields
from farwake.duhamel import (panel_weights, sweep_upstream, sweep_downstream,
                             extend_tail, DuhamelEngine)


def panel_oracle(z, n=200001):
    """e^{-z} int_0^1 e^{z t} (1-t) dt and ... t dt by brute quadrature."""
    t = np.linspace(0.0, 1.0, n)
    w = np.exp(z * (t - 1.0))
    i0 = np.trapezoid(w * (1.0 - t), t)
    i1 = np.trapezoid(w * t, t)
    return i0, i1


@pytest.mark.parametrize("z", [1e-8, 1e-4, 1e-2, 0.5, 5.0, 60.0,
                               0.3 + 2.0j, 4.0 - 7.0j])
def test_panel_weights_match_quadrature(z):
    u0, u1 = panel_weights(np.asarray(z), np.exp(-np.asarray(z)))
    o0, o1 = panel_oracle(z)
    npt.assert_allclose(u0, o0, rtol=1e-8, atol=1e-12)
    npt.assert_allclose(u1, o1, rtol=1e-8, atol=1e-12)


def test_panel_weights_limits():
    # z -> 0: both weights tend to 1/2 (plain trapezoid)
    u0, u1 = panel_weights(np.asarray(0.0), np.asarray(1.0))
    npt.assert_allclose([u0, u1], [0.5, 0.5], rtol=1e-12)
    # z -> inf with decay folded in: the surviving node keeps ~1/z,
    # the fully damped one only the boundary-layer mass ~1/z^2
    u0, u1 = panel_weights(np.asarray(1e4), np.asarray(0.0))
    npt.assert_allclose(u0, 1e-8, rtol=1e-8)
    npt.assert_allclose(u1, 1e-4 - 1e-8, rtol=1e-8)


def affine_sweep_oracle(lam, x, alpha, beta, upstream=True):
    """Exact integral of e^{lam |x_i - t|} (alpha + beta t) dt.

    Antiderivative of e^{lam (c - t)} (alpha + beta t) in t is
    e^{lam (c - t)} g(t) with g = -(alpha + beta t)/lam - beta/lam^2;
    same for the downstream orientation with lam sign-flipped in the
    exponent argument.
    """
    out = np.zeros_like(x, dtype=complex)
    for i, xi in enumerate(x):
        if upstream:
            lo, hi = x[0], xi
            e = lambda t: np.exp(lam * (xi - t))
            g = lambda t: -(alpha + beta * t) / lam - beta / lam ** 2
        else:
            lo, hi = xi, x[-1]
            e = lambda t: np.exp(lam * (t - xi))
            g = lambda t: (alpha + beta * t) / lam - beta / lam ** 2
        out[i] = e(hi) * g(hi) - e(lo) * g(lo)
    return out


@pytest.mark.parametrize("lam", [-0.3, -2.0, -900.0, -0.5 + 3.0j])
def test_sweep_upstream_affine(lam):
    x = np.geomspace(1.0, 40.0, 25)
    a = (0.7 + 0.2j) + (0.05 - 0.01j) * x
    got = sweep_upstream(a[:, None], lam, x)[:, 0]
    want = affine_sweep_oracle(lam, x, 0.7 + 0.2j, 0.05 - 0.01j, upstream=True)
    npt.assert_allclose(got, want, rtol=1e-10, atol=1e-14)


@pytest.mark.parametrize("lam", [-0.3, -2.0, -900.0, -0.5 + 3.0j])
def test_sweep_downstream_affine(lam):
    x = np.geomspace(1.0, 40.0, 25)
    a = (0.7 + 0.2j) + (0.05 - 0.01j) * x
    got = sweep_downstream(a[:, None], lam, x)[:, 0]
    want = affine_sweep_oracle(lam, x, 0.7 + 0.2j, 0.05 - 0.01j,
                               upstream=False)
    npt.assert_allclose(got, want, rtol=1e-10, atol=1e-14)


def test_sweep_downstream_nkeep():
    x = np.geomspace(1.0, 40.0, 25)
    a = np.ones((25, 3), dtype=complex)
    full = sweep_downstream(a, -1.0, x)
    part = sweep_downstream(a, -1.0, x, nkeep=10)
    npt.assert_allclose(part, full[:10])


def test_stiff_panels_stay_bounded():
    # lam dx ~ -350: the folded weights must not overflow or go negative
    x = np.linspace(0.0, 35.0, 4)
    a = np.ones((4, 1), dtype=complex)
    g = sweep_upstream(a, -30.0, x)
    assert np.all(np.isfinite(g))
    # steady state of int_0^x e^{-30(x-t)} dt = 1/30
    npt.assert_allclose(g[-1, 0], 1.0 / 30.0, rtol=1e-10)


def test_extend_tail_power_law():
    x = np.geomspace(1.0, 100.0, 120)
    a = (x ** -2.0)[:, None] * np.ones((1, 4))
    xe, ae = extend_tail(x, a, gamma_default=1.0)
    assert xe[-1] >= 7.0 * x[-1]          # reaches toward 8 Xmax
    assert xe.size - x.size <= 64
    npt.assert_allclose(ae[-1], (xe[-1] / x[-1]) ** -2.0 * a[-1], rtol=1e-6)
    # integrating the extended sources recovers the analytic tail mass
    # (trapezoid on the log grid, so only ~(d ln x)^2 accurate)
    g2 = sweep_downstream(ae, 0.0, xe, nkeep=x.size)
    npt.assert_allclose(g2[0, 0], 1.0 - 1.0 / xe[-1], rtol=5e-3)


def test_extend_tail_respects_default_when_flat():
    x = np.geomspace(1.0, 100.0, 50)
    a = np.zeros((50, 2), dtype=complex)
    xe, ae = extend_tail(x, a, gamma_default=2.0)
    assert np.all(ae[50:] == 0.0)


# ------------------------------------------------------------------- engine

PARAMS = Params(x0=20.0, strouhal=2.0)
SMALL = Grid(x0=20.0, xmax=400.0, nx=48, L=200.0, ny=128, nt=1)


@pytest.fixture(scope="module")
def engine():
    return DuhamelEngine(SMALL, PARAMS)


@pytest.fixture(scope="module")
def boundary():
    return make_boundary("gaussian-wake", SMALL, PARAMS, amp=0.01, seed=3)


def test_boundary_fields_match_direct_symbols(engine, boundary):
    st = engine.boundary_fields(boundary)
    disp = Dispersion.for_grid(SMALL, PARAMS.strouhal)
    lu_w = apply_Lu(boundary.w.astype(complex), SMALL, disp, PARAMS.mean_tol)
    lv = multiplier("Lv", disp)
    for i, x in enumerate(SMALL.x):
        s = x - SMALL.x0
        k1 = symbol("K1", s, disp)
        k0 = symbol("K0", s, disp)
        npt.assert_allclose(st.omega[i], k1 * boundary.w, atol=1e-13)
        npt.assert_allclose(st.u[i], k1 * lu_w + k0 * boundary.nu, atol=1e-13)
        npt.assert_allclose(st.v[i], k1 * (lv * boundary.w)
                            + k0 * boundary.mu, atol=1e-13)


def test_zero_sources_add_nothing(engine, boundary):
    shape = (SMALL.nx, SMALL.nmodes, SMALL.ny)
    z = np.zeros(shape, dtype=complex)
    quads = QuadFields(r=z, s=z.copy(), p=z.copy(), q=z.copy())
    full = engine.apply(quads, boundary)
    lin = engine.boundary_fields(boundary)
    for name in ("u", "v", "omega"):
        npt.assert_allclose(getattr(full, name), getattr(lin, name),
                            atol=1e-13)


def test_zero_everything_is_zero(engine):
    from farwake.state import BoundaryData
    shape = (SMALL.nmodes, SMALL.ny)
    bd = BoundaryData(grid=SMALL,
                      w=np.zeros(shape, complex),
                      nu=np.zeros(shape, complex),
                      mu=np.zeros(shape, complex))
    z = np.zeros((SMALL.nx,) + shape, dtype=complex)
    quads = QuadFields(r=z, s=z.copy(), p=z.copy(), q=z.copy())
    st = engine.apply(quads, bd)
    for name in ("u", "v", "omega"):
        assert np.all(getattr(st, name) == 0.0)
