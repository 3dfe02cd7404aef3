"""Multiset coding, order statistics and their rate-distortion bounds."""

__version__ = "0.1.0"
