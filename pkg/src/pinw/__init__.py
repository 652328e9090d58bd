"""Generalized pinwheel mesh generation."""
__version__ = "0.1.0"
