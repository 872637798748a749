"""Exception hierarchy shared by every opensym module."""


class OpenSymError(Exception):
    """Base class for all errors raised by opensym."""


class LayoutError(OpenSymError):
    """Unknown factor label, missing subsystem, or malformed layout."""


class DimensionError(OpenSymError):
    """Matrix shape does not match the factor or layout it is bound to."""


class NumericalError(OpenSymError):
    """A dense linear-algebra routine failed or produced non-finite output."""


class InvalidStateError(OpenSymError):
    """A density matrix is not Hermitian, not normalized, or not positive."""


class ScopeError(OpenSymError):
    """An operator does not act where it claims to (S-only, R-only)."""


class CatalogError(OpenSymError):
    """Unknown catalog model or missing/invalid model parameters."""


class ConfigError(OpenSymError):
    """Configuration could not be parsed or validated.

    ``location`` is a key path such as ``checks[1].candidate`` and ``line``
    is the 1-based source line when it could be recovered.
    """

    def __init__(self, message, location=None, line=None):
        self.message = message
        self.location = location
        self.line = line
        where = ""
        if location:
            where += f" at {location}"
        if line is not None:
            where += f" (line {line})"
        super().__init__(f"{message}{where}")
