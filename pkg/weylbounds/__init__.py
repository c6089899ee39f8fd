"""Weyl sums, completed sums, mean values, box covers and dimension bounds."""

__version__ = "0.1.0"
