"""Spectral solver for the time-periodic far wake behind a cylinder.

The package treats the streamwise coordinate as the evolution variable
of the 2D Navier-Stokes wake, expands fields in temporal harmonics and
y-Fourier modes, and solves the fixed-point form of the vorticity
transport equation on a half-plane [x0, inf) x R.
"""

from .errors import (
    FarwakeError, ConfigError, PreconditionError, NonZeroMeanError,
    UnresolvedError, TailFitError, ConvergenceError, NonContractiveError,
    MaxSweepsError, IOFormatError,
)
from .params import Params, Grid, bracket
from .state import (
    SpectralField, FlowState, BoundaryData, NormReport,
    composite_norm, boundary_norm, parity_defect,
)
from .quads import QuadFields, compute_quads, moment_zero, moment_y
from .duhamel import DuhamelEngine
from .solver import picard_solve, boundary_fit, make_boundary, wake_profiles
from .asymptotics import (
    Coeffs, FitRow, extract_coeffs, asymptotic_fields, decay_fit,
    a1_diagnostic, profile_f, profile_g, profile_h,
)
from .verify import BoundCheck
from . import spectral, kernels, quads, duhamel, solver, asymptotics, \
    verify, cli

__version__ = "0.1.0"
