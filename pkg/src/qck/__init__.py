"""Quadratic Chabauty toolkit for genus-2 curves over Q."""

__version__ = "0.1.0"
