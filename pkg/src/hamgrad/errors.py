"""Exception types shared across the package."""


class HamgradError(Exception):
    """Base class for all package errors."""


class DomainError(HamgradError, ValueError):
    """An argument lies outside the domain where a formula is defined."""


class ConfigurationError(HamgradError, ValueError):
    """A required parameter is missing or a setting is out of range."""


class SingularInputError(DomainError):
    """The requested quantity is singular at the given input."""


class ConsistencyError(HamgradError):
    """Inputs contradict each other (e.g. a sample value exceeds its ceiling)."""


class ValidationFailure(HamgradError):
    """A numerical validation (refinement study, bracket search) did not pass."""
