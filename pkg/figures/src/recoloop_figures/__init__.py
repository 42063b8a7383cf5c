"""Batch figure rendering for recoloop simulation records."""

from .io import SchemaError, read_records
from .render import FIGURE_KINDS, FigureSpec, build_figure, render

__all__ = [
    "FIGURE_KINDS",
    "FigureSpec",
    "SchemaError",
    "build_figure",
    "read_records",
    "render",
]

__version__ = "0.1.0"
