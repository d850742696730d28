"""Exception hierarchy shared by the library and the CLI."""


class GPBatchError(Exception):
    """Base class for all library errors."""


class InputError(GPBatchError, ValueError):
    """Malformed arguments: wrong shapes, empty inputs, bad indices."""


class ConfigurationError(GPBatchError, ValueError):
    """Invalid or infeasible settings (hyperparameters, schedules, config files)."""


class NumericalError(GPBatchError, ArithmeticError):
    """A factorization failed even after the jitter retry."""


class StateError(GPBatchError, RuntimeError):
    """An operation was requested that the object's state does not allow."""


class ResourceError(GPBatchError, MemoryError):
    """A requested construction would exceed a configured size cap."""
