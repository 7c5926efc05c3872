"""Grounded-language GR(1) synthesis with dialogue-driven specification repair."""

__version__ = "0.1.0"
