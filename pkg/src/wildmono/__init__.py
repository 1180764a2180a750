"""Exact-arithmetic certification toolkit for wild monodromy of p-cyclic covers."""

__version__ = "0.1.0"
