"""Admissibility of rank-one local systems on line arrangement complements."""

__version__ = "0.1.0"
