"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input outside the supported physical domain (bad delta, eps, scales...)."""


class AboveBarrierError(DomainError):
    """Energy does not exceed the potential amplitude; only delta < 1 is supported."""


class UnsupportedFamilyError(DomainError):
    """Operation not defined for this potential family."""


class NonPropagatingTailError(DomainError):
    """An asymptotic tail is classically forbidden (delta * u_tail >= 1)."""


class PoleEvaluationError(ValueError):
    """Shape evaluation requested too close to a singularity of the family."""


class TabulatedUsageError(ValueError):
    """Tabulated potentials support only real arguments inside their grid."""


class QuadratureError(RuntimeError):
    """Oscillatory quadrature failed to converge.

    Carries the achieved absolute error estimate in ``achieved``.
    """

    def __init__(self, message: str, achieved: float | None = None):
        super().__init__(message)
        self.achieved = achieved


class BranchTrackingError(RuntimeError):
    """Square-root branch continuity lost along an action contour.

    ``segment`` holds the (start, end) endpoints of the offending piece.
    """

    def __init__(self, message: str, segment: tuple[complex, complex] | None = None):
        super().__init__(message)
        self.segment = segment


class StepControlError(RuntimeError):
    """ODE step control failed; ``last_z`` is the last successfully reached point."""

    def __init__(self, message: str, last_z: float | None = None):
        super().__init__(message)
        self.last_z = last_z


class EnsembleConfigurationError(ValueError):
    """Random-ensemble configuration cannot be realized (modes, lengths, tapers)."""
