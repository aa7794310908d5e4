"""Constant mean curvature homothetical surfaces in the hyperbolic half-space:
exact replay of the classification argument plus numeric generation tools."""

__version__ = "0.1.0"
