"""Numerical verification of Bessel-K divisor-series identities."""

__version__ = "0.1.0"
