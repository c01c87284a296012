"""Exception types shared across the package."""


class SalienceError(Exception):
    """Base class for every error this package raises deliberately."""


class InputError(SalienceError):
    """Bad user-supplied input: files, schemas, configuration. CLI exit code 1."""


class ConsistencyError(SalienceError):
    """Pipeline state violated an internal invariant. CLI exit code 2."""
