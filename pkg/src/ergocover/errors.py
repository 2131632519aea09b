"""Exception types raised across the package."""


class ErgoCoverError(Exception):
    """Base class for all package errors."""


class DomainViolationError(ErgoCoverError, ValueError):
    """A point lies outside the search region."""


class ConfigError(ErgoCoverError, ValueError):
    """Invalid scenario or function parameters."""


class NormalizationError(ErgoCoverError, ValueError):
    """A density or coefficient vector is not normalized, or cannot be."""


class ShapeError(ErgoCoverError, ValueError):
    pass


class DataError(ErgoCoverError, ValueError):
    """A measurement is unusable (NaN or inf)."""


class DivergenceError(ErgoCoverError, RuntimeError):
    """The parameter adaptation blew up."""
