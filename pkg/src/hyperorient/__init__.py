"""Orientability thresholds and exact orientation of random k-uniform hypergraphs."""

__version__ = "0.1.0"
