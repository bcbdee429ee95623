"""Numerical checks for quantum coin-flip hedging and sequential game values."""

__version__ = "0.1.0"
