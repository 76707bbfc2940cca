"""Exception types raised across the package."""


class SmoothStopError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(SmoothStopError, ValueError):
    pass


class OutOfRangeError(SmoothStopError, ValueError):
    pass


class DimensionMismatchError(SmoothStopError, ValueError):
    pass


class MissingSeedError(SmoothStopError, ValueError):
    pass


class MissingNoiseError(SmoothStopError, ValueError):
    pass


class FormatError(SmoothStopError, ValueError):
    """A CSV or config file could not be parsed."""


class ConfigError(SmoothStopError, ValueError):
    """A run configuration failed validation.

    ``field`` names the offending key so the CLI can report it.
    """

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class OversmoothingWarning(UserWarning):
    """Smoothing index puts the rule in the regime alpha * p >= 1/2."""


class ZeroCriticalValueWarning(UserWarning):
    pass
