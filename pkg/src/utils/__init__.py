"""
BlochID Utilities
"""

from .config import DiscriminatorConfig, GeometrySpec, get_default_seed, get_log_level
from .errors import (
    BlochIDError,
    FitContractError,
    NumericalFailure,
    TraceFormatError,
    TraceValidationError,
)

__all__ = [
    'DiscriminatorConfig',
    'GeometrySpec',
    'get_default_seed',
    'get_log_level',
    'BlochIDError',
    'FitContractError',
    'NumericalFailure',
    'TraceFormatError',
    'TraceValidationError'
]
