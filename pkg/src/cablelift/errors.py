"""Exception types shared across the library."""


class ConfigurationError(ValueError):
    """A scenario, parameter set, or gain set failed validation."""


class DivergenceError(RuntimeError):
    """The simulated state left the valid region (non-finite or off-manifold)."""

    def __init__(self, message, t=None):
        if t is not None:
            message = f"{message} (t={t:.6f} s)"
        super().__init__(message)
        self.t = t
