"""Exception types shared across the package."""


class WirenoiseError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(WirenoiseError):
    """A numeric argument is outside its allowed domain (non-finite, wrong sign, ...)."""


class UnsupportedBasisError(WirenoiseError):
    """The requested homodyne basis cannot drive this protocol step."""


class DegenerateMeasurementError(WirenoiseError):
    """A measurement configuration is singular (zero-variance quadrature or singular step gate)."""


class UnreachableGateError(WirenoiseError):
    """The target gate is not realizable with the given number of measurements.

    Carries the singular pivot of the constraint system when available.
    """

    def __init__(self, message: str, pivot: float | None = None):
        super().__init__(message)
        self.pivot = pivot
