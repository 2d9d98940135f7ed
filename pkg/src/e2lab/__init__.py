"""Desk-scale experiments on semiprimes in a structured residue set."""

__version__ = "0.1.0"
