"""Integral transforms of hypergeometric series, their operator and KZ counterparts."""

__version__ = "1.0.0"
