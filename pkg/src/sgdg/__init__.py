"""Entropy-stable discontinuous Galerkin solver for stiffened-gas mixtures."""

__version__ = "0.1.0"
