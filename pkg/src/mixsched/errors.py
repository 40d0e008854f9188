class ConfigError(ValueError):
    """Invalid configuration or input parameters."""


class InvariantError(RuntimeError):
    """An internal simulation invariant was violated."""
