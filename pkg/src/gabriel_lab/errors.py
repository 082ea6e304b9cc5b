class DomainError(ValueError):
    """Input outside the domain where an operation is defined."""


class NumericalFailure(RuntimeError):
    """Quadrature did not reach the requested tolerance within its budget."""

    def __init__(self, message, value=None, error_estimate=None):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate
