"""Exact and numerical checks for two worked examples of K3 mirror symmetry."""

__version__ = "0.1.0"
