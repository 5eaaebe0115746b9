"""Shared exception types."""


class CapabilityError(RuntimeError):
    """Requested computation exceeds a hard size or degree limit."""


class ConfigError(ValueError):
    """Experiment configuration failed validation."""


class FitError(RuntimeError):
    """Least-squares fit could not be performed."""


class NumericsError(RuntimeError):
    """A numerical self-consistency check failed beyond tolerance."""
