"""Exception hierarchy shared by all solver modules."""


class PerifrontError(Exception):
    """Base class for all errors raised by this package."""


class SingularSystemError(PerifrontError):
    """Tridiagonal solve hit a (numerically) singular matrix."""


class CFLViolationError(PerifrontError):
    """Explicit advection step exceeds its stability limit."""

    def __init__(self, dt: float, dt_admissible: float):
        self.dt = dt
        self.dt_admissible = dt_admissible
        super().__init__(
            f"time step {dt:.3e} violates the advection CFL limit; "
            f"admissible dt <= {dt_admissible:.3e}"
        )


class NonConvergenceError(PerifrontError):
    """Iteration did not reach its tolerance within the allowed budget."""

    def __init__(self, message: str, residual: float | None = None):
        self.residual = residual
        super().__init__(message)


class BracketError(PerifrontError):
    """A bisection bracket does not straddle the target."""


class NoThresholdError(PerifrontError):
    """No critical length exists on the searched range."""


class PreconditionError(PerifrontError):
    """A documented precondition of an operation is not met."""


class TruncationError(PerifrontError):
    """Finite truncation of a half-line domain is too small."""


class IntegrityError(PerifrontError):
    """A runtime invariant of a simulation was breached."""

    def __init__(self, message: str, step: int | None = None):
        self.step = step
        super().__init__(message if step is None else f"{message} (step {step})")


class ParameterError(PerifrontError):
    """Certificate or solver parameters are outside their admissible range."""


class ConfigError(PerifrontError):
    """Scenario configuration failed validation."""
