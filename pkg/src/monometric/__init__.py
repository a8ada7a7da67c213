"""Monotone metric kernels, non-commutative multiplication maps and positivity tests."""

__version__ = "0.1.0"
