"""Heegner-point criteria at p = 3 and rank statistics for twist families of elliptic curves."""

__version__ = "0.1.0"
