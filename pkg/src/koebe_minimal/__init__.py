"""Discrete S-isothermic minimal surfaces from orthogonal circle patterns."""
__version__ = "0.1.0"
