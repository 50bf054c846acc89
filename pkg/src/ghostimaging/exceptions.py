"""Exception hierarchy shared by every module.

All domain errors derive from :class:`GhostImagingError` so callers (and the
CLI) can separate them from programming errors.
"""


class GhostImagingError(Exception):
    """Base class for domain errors."""


class InvalidOrderError(GhostImagingError, ValueError):
    """Requested Hadamard order is outside {2^i, 12*2^i, 20*2^i}."""


class SizeLimitError(GhostImagingError, MemoryError):
    """A construction would exceed the configured size cap."""


class DimensionMismatchError(GhostImagingError, ValueError):
    pass


class DegenerateRangeError(GhostImagingError, ValueError):
    """Min-max normalization of a constant image."""


class PGMFormatError(GhostImagingError, ValueError):
    pass


class ConfigError(GhostImagingError, ValueError):
    pass


class InvalidArgumentError(GhostImagingError, ValueError):
    pass
