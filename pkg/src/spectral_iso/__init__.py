"""Spectral partition machinery for graph automorphism and isomorphism problems."""
__version__ = "0.1.0"
