"""Exception types shared across the package."""


class BlochtkError(Exception):
    """Base class for package-specific failures."""


class DegenerateLatticeError(BlochtkError):
    """Primitive vectors are (numerically) linearly dependent."""


class IntegrationError(BlochtkError):
    """The adaptive integrator could not continue (step-size underflow)."""

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class AccuracyError(BlochtkError):
    """A requested tolerance could not be met; carries the achieved value."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class FormExtractionError(BlochtkError):
    """A periodic part failed its periodicity or nontriviality check."""

    def __init__(self, message, deviation=None):
        super().__init__(message)
        self.deviation = deviation


class NotExpandableError(BlochtkError):
    """A product solution contains a linear-growth factor and has no pure Bloch expansion."""
