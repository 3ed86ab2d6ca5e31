"""Effective height bounds via Runge's method, and a sieve for six-term square progressions."""

__version__ = "0.1.0"
