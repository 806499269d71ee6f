"""Computational non-integrability analysis of the 3-particle Dyson chain."""

__version__ = "0.1.0"
