"""Exact Laurent polynomials, vector fields and differential forms on charts."""

from .forms import (
    DiffForm,
    NotClosed,
    NotExact,
    VectorField,
    exterior_d,
    find_primitive,
    poincare_split,
)
from .linsolve import LinearSystem
from .maps import ChartMap
from .ring import ChartMismatch, ChartRing, IllegalExponent, LaurentPoly
from .text import ParseError, format_form, format_poly, parse_form, parse_poly

__all__ = [
    "ChartMap",
    "ChartMismatch",
    "ChartRing",
    "DiffForm",
    "IllegalExponent",
    "LaurentPoly",
    "LinearSystem",
    "NotClosed",
    "NotExact",
    "ParseError",
    "VectorField",
    "exterior_d",
    "find_primitive",
    "format_form",
    "format_poly",
    "parse_form",
    "parse_poly",
    "poincare_split",
]
