"""Exception types raised across the package."""


class InvalidArgument(ValueError):
    """An argument is outside the documented domain of an operation."""


class InvalidChannel(ValueError):
    """A noise channel is malformed (e.g. Kraus operators not trace preserving)."""


class UnsupportedEngine(ValueError):
    """The requested simulation engine cannot handle the given noise channel."""


class ConfigError(ValueError):
    """An experiment configuration is invalid.

    ``field`` names the offending configuration key.
    """

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
