"""Approximation algorithms on graphs given with a bounded-width contraction sequence."""

__version__ = "0.1.0"
