"""
Core module initialization
"""

from .config import DEFAULT_TOLERANCES, Settings, Tolerances, get_settings
from .exceptions import (
    ComputationError,
    EntangleError,
    InputError,
    InvariantViolation,
)
from .logging_config import setup_logging

__all__ = [
    'DEFAULT_TOLERANCES',
    'Settings',
    'Tolerances',
    'get_settings',
    'EntangleError',
    'InputError',
    'ComputationError',
    'InvariantViolation',
    'setup_logging',
]
