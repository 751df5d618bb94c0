"""Fractional Brownian fields, their Levy area and multiscale bookkeeping."""

__version__ = "0.1.0"
