"""Homology of polygraphs with coefficients in local systems."""

__version__ = "0.1.0"
