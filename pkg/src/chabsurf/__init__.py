"""Effective p-adic and finite-field tools for bounding rational points on surfaces."""

__version__ = "0.1.0"
