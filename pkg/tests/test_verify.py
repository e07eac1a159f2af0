"""Envelope checks against closed-form kernel norms.

The heat and Poisson profiles have textbook norms, which pins down the
adaptive reconstruction + quadrature underneath every envelope row:

    ||Kc(x)||_inf = (4 pi x)^{-1/2}     ||Kc(x)||_2 = (8 pi x)^{-1/4}
    ||K0(x)||_1   = 1                   ||K0(x)||_2 = (2 pi x)^{-1/2}
    ||dy Kc(x)||_1 = 2 (4 pi x)^{-1/2}
"""

import numpy as np
import numpy.testing as npt
import pytest

from farwake import Params
from farwake.verify import (BoundCheck, check_L_operators, kernel_norm,
                            run_all)


PARAMS = Params(x0=20.0, strouhal=2.0)
XS = (0.5, 3.0, 40.0)


@pytest.mark.parametrize("x", XS)
def test_heat_kernel_norms(x):
    npt.assert_allclose(kernel_norm("Kc", x, 0.0, np.inf),
                        1.0 / np.sqrt(4.0 * np.pi * x), rtol=1e-12)
    npt.assert_allclose(kernel_norm("Kc", x, 0.0, 2),
                        (8.0 * np.pi * x) ** -0.25, rtol=1e-12)
    # |dy Kc| needs the sign change at y = 0 resolved; quadrature-limited
    npt.assert_allclose(kernel_norm("Kc", x, 0.0, 1, deriv=1),
                        2.0 / np.sqrt(4.0 * np.pi * x), rtol=1e-3)


@pytest.mark.parametrize("x", XS)
def test_poisson_kernel_norms(x):
    npt.assert_allclose(kernel_norm("K0", x, 0.0, 1), 1.0, rtol=1e-12)
    # 1/y^2 tails put this at the mercy of the domain cutoff
    npt.assert_allclose(kernel_norm("K0", x, 0.0, 2),
                        1.0 / np.sqrt(2.0 * np.pi * x), rtol=2e-3)


@pytest.mark.parametrize("x", XS)
def test_transport_kernel_conserves_mass(x):
    # the mean-mode principal kernel moves vorticity without creating it
    npt.assert_allclose(kernel_norm("K1", x, 0.0, 1), 1.0, rtol=1e-10)


def test_weighted_norm_closed_form():
    # || |y| Kc(x) ||_2 = (sqrt(2 pi x) / (4 pi))^{1/2}, an x^{1/4} law
    for x in (4.0, 16.0):
        npt.assert_allclose(kernel_norm("Kc", x, 0.0, 2, beta=1.0),
                            np.sqrt(np.sqrt(2.0 * np.pi * x) / (4.0 * np.pi)),
                            rtol=1e-10)


def test_multiplier_operator_rows_pass():
    rows = check_L_operators(PARAMS, quick=True)
    assert len(rows) > 0
    assert all(isinstance(r, BoundCheck) for r in rows)
    assert all(r.passed for r in rows)


def test_quick_sweep_all_rows_pass():
    rows = run_all(PARAMS, quick=True)
    assert len(rows) >= 90
    bad = [r.check_id for r in rows if not r.passed]
    assert bad == []
    # structure of a row
    r = rows[0]
    assert r.check_id and r.quantity and r.envelope
    assert np.isfinite(r.fitted_c) and r.fitted_c > 0
    assert r.passed == (r.margin >= 0.0)
    assert r.xs is not None and r.ratios is not None
    assert len(r.xs) == len(r.ratios)
