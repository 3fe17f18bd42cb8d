"""Pseudo-spectral laboratory for oscillatory wave multipliers on atomic measure spaces."""

__version__ = "0.1.0"
