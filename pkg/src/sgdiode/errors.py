"""Exception types shared across the solver."""


class ConfigurationError(ValueError):
    """A constant, grid or config value is outside its admissible range."""


class DomainError(ValueError):
    """An evaluation point or parameter lies outside the supported domain."""


class NumericalFailure(RuntimeError):
    """The solver state became unusable (NaN/Inf, vanishing density, ...)."""


class UsageError(ValueError):
    """Inconsistent inputs at an API or CLI boundary (mismatched grids, ...)."""
