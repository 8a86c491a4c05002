"""Heegaard Floer homology of integral surgeries on links, at desk scale."""

__version__ = "0.1.0"
