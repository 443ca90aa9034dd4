"""Locus and envelope equations of ruler-and-compass constructions."""

from loceq.poly import MultiPoly, VarRegistry, canonicalize, parse_poly

__all__ = ["MultiPoly", "VarRegistry", "canonicalize", "parse_poly"]
__version__ = "0.1.0"
