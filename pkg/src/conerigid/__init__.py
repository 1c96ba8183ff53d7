"""Exact certifier for the maximal-singularities method on the three-dimensional double cone."""

__version__ = "0.1.0"
