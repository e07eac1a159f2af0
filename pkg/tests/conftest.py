"""Shared fixtures.

The expensive solves (reference-resolution nonlinear runs) are
session-scoped so the acceptance tests and the extraction tests share
them instead of re-solving.  Everything else runs on throwaway small
grids defined locally in each module.
"""

from types import SimpleNamespace

import pytest

from farwake import Params, Grid, make_boundary, picard_solve
from farwake.asymptotics import extract_coeffs, decay_fit, a1_diagnostic


REF_PARAMS = Params(x0=20.0, strouhal=2.0)
REF_GRID = Grid(x0=20.0, xmax=2000.0, nx=160, L=400.0, ny=512, nt=2)


@pytest.fixture(scope="session")
def reference_run():
    """Nonlinear production run: gaussian wake, amp 0.01, seed 3."""
    bd = make_boundary("gaussian-wake", REF_GRID, REF_PARAMS, amp=0.01, seed=3)
    state, info = picard_solve(bd, REF_PARAMS)
    return SimpleNamespace(params=REF_PARAMS, grid=REF_GRID, bd=bd,
                           state=state, info=info)


@pytest.fixture(scope="session")
def reference_coeffs(reference_run):
    r = reference_run
    co = extract_coeffs(r.state, r.bd, r.params)
    rows = decay_fit(r.state, co, r.params)
    diag = a1_diagnostic(r.state, r.params)
    return SimpleNamespace(co=co, rows=rows, diag=diag)


@pytest.fixture(scope="session")
def smoke_run():
    """Small, fast nonlinear run for structural checks."""
    params = Params(x0=20.0, strouhal=2.0)
    grid = Grid(x0=20.0, xmax=400.0, nx=48, L=200.0, ny=128, nt=1)
    bd = make_boundary("gaussian-wake", grid, params, amp=0.01, seed=3)
    state, info = picard_solve(bd, params)
    return SimpleNamespace(params=params, grid=grid, bd=bd,
                           state=state, info=info)
