"""Exception hierarchy shared across the package."""


class QcevolveError(Exception):
    """Base class for all package errors."""


class ConfigurationError(QcevolveError):
    """A user-supplied parameter or property file is invalid."""


class CircuitStructureError(QcevolveError):
    """A circuit grid violates its structural invariants."""


class ParseError(QcevolveError):
    """A serialized document could not be parsed."""
