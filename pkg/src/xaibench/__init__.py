"""Benchmarking post hoc feature attribution methods on tabular data."""

__version__ = "0.1.0"
