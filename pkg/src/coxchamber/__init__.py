"""Computational Coxeter theory on chambers."""
__version__ = "0.1.0"
