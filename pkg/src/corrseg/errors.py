"""Exception types shared across the package."""


class CorrsegError(Exception):
    """Base class for all corrseg-specific errors."""


class InputError(CorrsegError):
    """Malformed user input (CSV files, configs). CLI maps this to exit code 2."""


class DegenerateSegmentError(CorrsegError):
    """A segment has zero variance in at least one series; correlations are undefined."""


class NonPositiveVarianceError(CorrsegError):
    """The estimated long-run variance of the correlation is not positive.

    The segment cannot be tested; callers should skip it and log a warning.
    """


class SegmentTooShortError(CorrsegError):
    """The segment has fewer observations than the configured minimum."""
