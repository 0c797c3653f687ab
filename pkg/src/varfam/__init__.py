"""Exponential, q-exponential and free exponential families built from variance functions."""
from ._accel import HAVE_NUMBA
from .errors import (
    DegenerateCaseError,
    DomainError,
    InsufficientOrderError,
    InvariantError,
    NonConvergenceError,
    PoleError,
    PositivityError,
)

__version__ = "0.1.0"

__all__ = [
    "HAVE_NUMBA",
    "DegenerateCaseError",
    "DomainError",
    "InsufficientOrderError",
    "InvariantError",
    "NonConvergenceError",
    "PoleError",
    "PositivityError",
]
