"""Multiprecision computation of Painleve-II pole lattices and Shapiro-Tater spectral lattices."""

__version__ = "0.1.0"
