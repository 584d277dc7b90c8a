"""Exception types shared by all radsim modules."""


class RadsimError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(RadsimError, ValueError):
    """A value lies outside an operation's mathematical domain."""


class ShapeError(RadsimError, ValueError):
    """Inputs have missing, mismatched, or invalid dimensions."""


class ConfigurationError(RadsimError, ValueError):
    """A configuration is internally inconsistent (e.g. Nyquist violation)."""


class ParseError(RadsimError, ValueError):
    """Text, file content, or an encoded sequence could not be decoded."""


class ConflictError(RadsimError, ValueError):
    """An operation would clobber existing state (e.g. duplicate label)."""
