"""Shared exception types."""


class ConfigError(ValueError):
    """Invalid or unknown experiment configuration field."""


class MitigationError(RuntimeError):
    """Error mitigation refused, e.g. attenuation too strong to invert."""
