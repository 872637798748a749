"""Numerical verification of symmetries of open quantum dynamics."""

__version__ = "0.1.0"
