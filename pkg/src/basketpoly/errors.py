class ParameterError(ValueError):
    """Raised when model, contract or method parameters fall outside their domain."""


class ConvergenceError(RuntimeError):
    """Raised when a numerical routine fails to reach its tolerance before its cap."""
