"""Geometric symmetric chain decompositions of rational polytopes and their discretizations."""

__version__ = "0.1.0"
