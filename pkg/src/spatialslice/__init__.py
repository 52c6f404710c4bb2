"""Sliceness obstructions for spatial graphs in the 3-sphere."""

__version__ = "0.1.0"
