"""Executable checks for Bochner-Martinelli duality of holomorphic functions in C^n."""

__version__ = "0.1.0"
