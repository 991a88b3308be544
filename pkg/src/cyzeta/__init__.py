"""Euler factors of Calabi-Yau operators from p-adically truncated period recurrences."""

from .operator import CYOperator, derive_recurrence, get_operator, load_database, validate_operator
from .pipeline import PrimeResult, compute_points_streaming, compute_prime
from .recurrence import accuracy_bound, target_accuracy_B

__all__ = [
    "CYOperator",
    "PrimeResult",
    "accuracy_bound",
    "compute_points_streaming",
    "compute_prime",
    "derive_recurrence",
    "get_operator",
    "load_database",
    "target_accuracy_B",
    "validate_operator",
]

__version__ = "0.1.0"
