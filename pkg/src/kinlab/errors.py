"""Exception types shared across the laboratory."""


class KinlabError(Exception):
    """Base class for all kinlab errors."""


class ConfigurationError(KinlabError):
    """Invalid model/grid/solver configuration."""


class NumericalError(KinlabError):
    """Overflow, non-finite values, or a failed numerical routine."""


class SchemeError(NumericalError):
    """A time step produced values the scheme guarantees impossible."""


class TruncationError(KinlabError):
    """Mass reached the artificial far boundary; the run is invalid."""


class ZeroSignalError(KinlabError):
    """A fit or calibration was asked for on identically-zero data."""


class InsufficientDataError(KinlabError):
    """A consistency check needs denser recorded data than available."""


class CalibrationError(KinlabError):
    """A calibrated parameter no longer satisfies its defining inequality."""


class PreconditionError(KinlabError):
    """An operation's documented precondition was violated."""


class ResolutionError(KinlabError):
    """Spectral content not resolved by the grid (aliasing detected)."""
