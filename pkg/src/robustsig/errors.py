"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of a function."""


class InsufficientDataError(ValueError):
    """Too few observations for the requested statistic."""


class ShapeError(ValueError):
    """Data length incompatible with a block layout."""


class UnsupportedVariantError(ValueError):
    """Operation not defined for the requested test kind."""


class ConfigurationError(ValueError):
    """Numerical configuration is invalid (e.g. unstable grid)."""


class ResourceError(RuntimeError):
    """Problem size exceeds what the solver will attempt."""
