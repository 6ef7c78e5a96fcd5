"""Computational tools for the value distribution of zeta near the critical line."""
__version__ = "0.1.0"
