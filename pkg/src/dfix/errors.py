"""Exception types shared across the package."""


class InvalidParameterError(ValueError):
    """An argument is outside the documented range."""


class DomainError(ValueError):
    """Input is well-formed but the operation is undefined on it."""


class WeightValidationError(ValueError):
    """A consensus matrix violates row-stochasticity or the graph pattern."""


class DivergenceError(RuntimeError):
    """An iteration produced non-finite values."""


class ConfigError(ValueError):
    """Experiment configuration could not be parsed or validated."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)
