"""Combinatorial r-spin surfaces, state-sum TFTs and mapping class group orbits."""

__version__ = "0.1.0"
