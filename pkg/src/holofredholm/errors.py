"""Exception types shared across the package."""


class UsageError(ValueError):
    """Caller violated a documented precondition (shapes, ranges, options)."""


class DomainError(ValueError):
    """Evaluation point is outside the admissible domain (at or near a pole)."""


class ContourError(RuntimeError):
    """Contour touches a pole or passes too close to the spectrum."""


class CapacityError(RuntimeError):
    """Probe rank / moment depth too small for the spectral content found."""


class SetupError(ValueError):
    """Experiment configuration inconsistent with the problem data."""


class InsufficientDataError(ValueError):
    """Not enough usable data points for the requested fit."""


class WitnessError(RuntimeError):
    """No compact shift in the search list certifies coercivity."""


class InconclusiveError(RuntimeError):
    """Jordan chain search hit the length cap with kernel still growing."""

    def __init__(self, message, kernel_dims=None):
        super().__init__(message)
        self.kernel_dims = list(kernel_dims) if kernel_dims is not None else []
