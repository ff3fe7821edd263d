"""Exact computation of transitive vertex and Courant algebroids on coordinate charts."""

__version__ = "0.1.0"
