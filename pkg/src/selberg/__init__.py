"""Selberg-bisector geometry in P(n) = SL(n,R)/SO(n)."""

__version__ = "0.1.0"
