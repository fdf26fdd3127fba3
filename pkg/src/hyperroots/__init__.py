"""Hyper-root lattices of SU(3) and SU(2) module categories."""

__version__ = "0.1.0"
