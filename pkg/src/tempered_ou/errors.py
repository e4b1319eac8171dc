"""Exception hierarchy shared by every sampler and oracle."""


class TemperedOUError(Exception):
    """Base class for all library errors."""


class ParameterError(TemperedOUError, ValueError):
    """A parameter lies outside the region where the law is defined."""


class DomainError(TemperedOUError, ValueError):
    """A density or cdf was evaluated outside its support."""


class ConfigurationError(TemperedOUError, ValueError):
    """A method was requested for parameters it does not cover."""


class RegimeError(ConfigurationError):
    """The tail index ``alpha`` is outside the regime an operation supports."""


class NumericError(TemperedOUError, ArithmeticError):
    """A quadrature, inversion or rejection loop failed to converge."""
