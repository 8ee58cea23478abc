"""Exact tools for linear systems, birational maps of P^3 and canonical thresholds."""

__version__ = "0.1.0"

from .field import GF, QQ, DEFAULT_PRIME, LIFT_PRIME, FieldError
from .poly import Polynomial, PolynomialError, gcd, resultant, to_string, divides
from .maps import RationalMap, apply_map, normalize_map, BASE_POINT

__all__ = [
    "GF", "QQ", "DEFAULT_PRIME", "LIFT_PRIME", "FieldError",
    "Polynomial", "PolynomialError", "gcd", "resultant", "to_string", "divides",
    "RationalMap", "apply_map", "normalize_map", "BASE_POINT",
]
