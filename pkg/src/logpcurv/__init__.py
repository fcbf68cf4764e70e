"""Exact logarithmic connections, Witt vectors, and spectral data over small finite fields."""

__version__ = "0.1.0"
