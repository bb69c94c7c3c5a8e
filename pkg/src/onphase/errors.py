"""Exception hierarchy shared across the toolkit.

Every error raised on a contract violation derives from :class:`OnphaseError`
so callers can catch toolkit failures without swallowing programming errors.
"""


class OnphaseError(Exception):
    """Base class for all toolkit errors."""


class FormatError(OnphaseError):
    """File does not match the expected on-disk format (bad magic, bad layout)."""


class InvalidHeaderError(FormatError):
    """Structurally valid header with impossible field values (V=0, N=0, ...)."""


class TruncationError(FormatError):
    """Payload shorter than the header promises."""


class DataError(OnphaseError):
    """Numeric payload contains non-finite or otherwise unusable values."""


class ParseError(OnphaseError):
    """A structured-text record could not be parsed; message names the record."""


class ValidationError(OnphaseError):
    """An input violates a documented invariant (negative temperature, ...)."""


class RangeError(OnphaseError):
    """An index or coordinate falls outside its valid range."""


class DegenerateInputError(OnphaseError):
    """Input is formally valid but degenerate (zero-norm vector, coincident points)."""


class InsufficientDataError(OnphaseError):
    """Too few points/samples for the requested computation."""


class ConvergenceError(OnphaseError):
    """Fit did not converge or is unidentifiable. Carries the best fit so far."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class SignalTooWeakError(OnphaseError):
    """Observable too noisy or too small to extract the requested quantity."""


class CapacityError(OnphaseError):
    """Requested problem size exceeds a configured resource cap."""


class EndpointError(OnphaseError):
    """Inference endpoint unreachable or persistently failing."""


class DependencyError(OnphaseError):
    """A pipeline stage needs an artifact another step must produce first."""
