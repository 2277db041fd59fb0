"""
Exception types raised by the stopping solver
"""


class StoppingError(Exception):
    """Base class for all solver errors"""


class ValidationError(StoppingError, ValueError):
    """Input or configuration rejected before any computation"""


class NonPositiveParameter(ValidationError):
    def __init__(self, field, value):
        self.field = field
        self.value = value
        super().__init__(f"{field} must be strictly positive, got {value!r}")


class NonFiniteParameter(ValidationError):
    def __init__(self, field, value):
        self.field = field
        self.value = value
        super().__init__(f"{field} must be finite, got {value!r}")


class OutOfDomain(ValidationError):
    """Argument outside the domain where a formula is defined"""


class OutOfSupport(ValidationError):
    """Point outside the support of a distribution"""


class ConfigError(ValidationError):
    """Malformed run configuration"""


class SolverFailure(StoppingError, ArithmeticError):
    """A root or fixed point could not be located to tolerance"""

    def __init__(self, message, residuals=None):
        self.residuals = dict(residuals or {})
        if self.residuals:
            details = ", ".join(f"{key}={value:.3e}" for key, value in self.residuals.items())
            message = f"{message} ({details})"
        super().__init__(message)


class ConsistencyFailure(StoppingError, ArithmeticError):
    """Two independent computations of the same quantity disagree"""


class QuadratureNonConvergence(StoppingError, ArithmeticError):
    def __init__(self, message, last_estimate=None, last_change=None):
        self.last_estimate = last_estimate
        self.last_change = last_change
        super().__init__(message)
