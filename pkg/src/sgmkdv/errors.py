"""Exception types shared across the toolkit."""


class SGError(Exception):
    """Base class for all toolkit errors."""


class NonZeroMean(SGError, ValueError):
    pass


class NonIntegerMean(SGError, ValueError):
    pass


class NotOnMsin(SGError, ValueError):
    """The function violates the constraint int sin(u) dx = 0."""


class NotOnMsinh(SGError, ValueError):
    """The function violates the constraint int sinh(u) dx = 0."""


class WrongBranch(SGError, ValueError):
    pass


class FlowError(SGError):
    """Failure during time integration; carries the partial trajectory."""

    def __init__(self, message, *, time=None, trajectory=None, **info):
        super().__init__(message)
        self.time = time
        self.trajectory = trajectory
        self.info = info


class OnRamificationLocus(FlowError, ValueError):
    """The moment int exp(iu) dx vanishes (u is on, or numerically at, Sing)."""


class ResolutionLoss(FlowError):
    pass


class OdeStepFailure(SGError):
    pass


class DegenerateMetric(SGError, ValueError):
    pass


class CompatibilityFailure(SGError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class IoFailure(SGError, OSError):
    pass


class SpecParseError(SGError, ValueError):
    """Malformed initial-condition string or configuration entry."""
