"""Samplers, densities and transition laws for p-tempered stable OU processes."""
from .errors import (ConfigurationError, DomainError, NumericError, ParameterError,
                     RegimeError, TemperedOUError)
from .rand_core import RandomStream, derive_substream, make_stream

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError", "DomainError", "NumericError", "ParameterError", "RegimeError",
    "TemperedOUError", "RandomStream", "derive_substream", "make_stream", "__version__",
]
