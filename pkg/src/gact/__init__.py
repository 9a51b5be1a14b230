"""Finite groups acting on relational structures and Boolean rings."""

__version__ = "0.1.0"
