"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Raised when a spec, scheme, or config is structurally invalid."""


class NumericalError(RuntimeError):
    """Raised when a numerical routine cannot proceed (singular matrix, ...)."""


class TrainingFailure(RuntimeError):
    """Raised when a training loop diverges or produces non-finite values."""
