"""Exception types raised by the squeezecav solvers and CLI."""


class SqueezecavError(Exception):
    """Base class for all package errors."""


class ConfigError(SqueezecavError):
    """A run configuration is malformed, incomplete or out of range."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


class SolverError(SqueezecavError):
    """Base class for errors raised while solving."""


class DomainError(SolverError, ValueError):
    """An argument lies outside the mathematical domain of a formula."""


class UndefinedCorrelationError(SolverError):
    """g2 requested for a state with no photons (0/0)."""


class NoSteadyStateError(SolverError):
    """Steady-state quantities requested at or above critical pumping."""


class SingularPhaseError(SolverError):
    """Phase equation is singular: sinh(u) ~ 0 with an off-resonant drive."""


class IntegrationOverflowError(SolverError):
    """State left the range representable in double precision."""

    def __init__(self, tau_reached, message=None):
        super().__init__(
            message or f"integration aborted at tau={tau_reached:.6g}: state overflow"
        )
        self.tau_reached = tau_reached


class ThresholdNotReachedError(SolverError):
    """The quadrature-noise target was not crossed before tau_end."""

    def __init__(self, target, last_dx, tau_end):
        super().__init__(
            f"dX target {target:.6g} not reached by tau={tau_end:.6g}"
            f" (last dX={last_dx:.6g})"
        )
        self.target = target
        self.last_dx = last_dx
        self.tau_end = tau_end


class DegenerateTargetError(SolverError):
    """Threshold target is above the vacuum noise level, so no crossing exists."""


class TruncationError(SolverError):
    """The Fock-space truncation is inadequate for the requested state."""

    def __init__(self, message, tau=None, n_mean=None):
        super().__init__(message)
        self.tau = tau
        self.n_mean = n_mean


class DatasetInvariantError(SqueezecavError):
    """A figure dataset violates its schema invariants (empty/ragged columns)."""
