"""Exact envelope matrices, R-matrices and Kempf-Ness strata for framed quiver varieties."""

__version__ = "0.1.0"
