"""Exception types that map onto the CLI exit codes."""


class EvofuseError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(EvofuseError):
    """Invalid usage, configuration, or hyperparameters (exit code 1)."""


class DataError(EvofuseError):
    """Malformed or inconsistent input data (exit code 2)."""
