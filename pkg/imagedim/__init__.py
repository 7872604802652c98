"""Generalized q-dimensions of image measures under Gaussian random fields."""

__version__ = "0.1.0"
