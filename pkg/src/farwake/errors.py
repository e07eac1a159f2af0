"""Exception types shared across the package.

The hierarchy mirrors the failure modes of the pipeline: bad inputs
(ConfigError), violated mathematical preconditions (PreconditionError
and its subclasses), and iteration failures (ConvergenceError and its
subclasses).  The command line maps these onto distinct exit codes.
"""


class FarwakeError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(FarwakeError):
    """Malformed or inconsistent run configuration."""


class PreconditionError(FarwakeError):
    """A mathematical precondition of an operator was violated."""


class NonZeroMeanError(PreconditionError):
    """Antiderivative requested of a field whose mean does not vanish."""


class UnresolvedError(PreconditionError):
    """A quadrature or stencil was asked to operate below its resolution."""


class TailFitError(PreconditionError):
    """Power-law tail extrapolation could not be fitted sanely."""


class ConvergenceError(FarwakeError):
    """An iterative procedure failed to converge."""


class NonContractiveError(ConvergenceError):
    """Picard sweeps expand instead of contracting."""


class MaxSweepsError(ConvergenceError):
    """Iteration budget exhausted before reaching tolerance."""


class IOFormatError(FarwakeError):
    """Persisted artifact missing or malformed."""
