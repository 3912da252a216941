"""Koszul cocomplexes, Hochschild and Poisson cohomology of quadratic algebras."""

__version__ = "0.1.0"
