"""Exception types shared across the package."""


class KickedTopError(Exception):
    """Base class for errors raised by this package."""


class ConfigError(KickedTopError):
    """Invalid run configuration (CLI exit code 2)."""


class NumericalInvariantError(KickedTopError):
    """A numerical invariant was violated at runtime (CLI exit code 3)."""
