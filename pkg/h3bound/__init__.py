"""Hyperbolic geometry and combinatorics behind injectivity-radius bounds."""

__version__ = "0.0.0"
