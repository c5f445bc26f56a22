"""Exception types shared across the package."""


class SGFError(Exception):
    """Base class for data/validation errors raised by this package."""


class StreamFormatError(SGFError):
    """Malformed or inconsistent event-stream input.

    Carries the 1-based line number of the offending record when the
    error comes from a text source.
    """

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class GeometryError(SGFError):
    """Grid geometry is degenerate or inconsistent between stages."""


class ConfigError(SGFError):
    """Invalid configuration; the message names the offending key."""

    def __init__(self, key: str, message: str):
        super().__init__(f"config key '{key}': {message}")
        self.key = key


class UntrainedRouteError(SGFError):
    """The routing stage selected a group with no trained downstream unit."""


class TranslationFault(SGFError):
    """An address-event packet hit an unmapped lookup-table entry."""
