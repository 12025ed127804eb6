"""Counting and extremal-weight experiments on plane geometric graphs."""

__version__ = "0.1.0"
