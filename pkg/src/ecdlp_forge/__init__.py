"""Reversible-circuit synthesis and desk-scale ECDLP emulation over GF(2^m)."""

__version__ = "0.1.0"
