"""Generalized ladder operators for separated Schroedinger equations."""

__version__ = "0.1.0"
