"""Exception types shared across the package."""


class MiniBertError(Exception):
    """Base class for all package-specific errors."""


class ShapeError(MiniBertError, ValueError):
    """Operands have incompatible shapes."""


class InputError(MiniBertError, ValueError):
    """Input data violates a precondition (empty corpus, bad ratio, ...)."""


class ParseError(MiniBertError, ValueError):
    """A data file could not be parsed; carries the offending line number."""

    def __init__(self, message: str, line_number: int | None = None):
        super().__init__(message)
        self.line_number = line_number


class FormatError(MiniBertError, ValueError):
    """A serialized artifact (checkpoint, store) is corrupt or wrong-version."""


class ConfigError(MiniBertError, ValueError):
    """A configuration value is invalid."""


class StateError(MiniBertError, RuntimeError):
    """An operation was called in an invalid state (double backward, double prune)."""


class NotFittedError(MiniBertError, RuntimeError):
    """An estimator method requiring a fit was called before fit()."""
