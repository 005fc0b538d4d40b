"""Exception types shared across the package."""


class CapacityError(ValueError):
    """A dense object would exceed the configured entry budget."""


class ValidationError(ValueError):
    """An operator fails a structural requirement (e.g. not a +/-1 observable)."""


class ConfigurationError(ValueError):
    """A requested observable or setting has not been supplied."""


class DegenerateConditioningError(ArithmeticError):
    """Conditioning on an outcome whose probability is numerically zero."""


class InternalConsistencyError(RuntimeError):
    """A quantity violates a bound that is guaranteed by construction."""
