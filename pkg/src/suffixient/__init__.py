"""Smallest suffixient sets and a pattern-matching index built on them."""

__version__ = "0.1.0"
