"""Perturbation matrices around zeros of classical orthogonal polynomials."""

__version__ = "0.1.0"
