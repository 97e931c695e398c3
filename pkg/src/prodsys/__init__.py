"""Finite dyadic-grid models of tensor product systems of Hilbert spaces."""
__version__ = "0.1.0"
