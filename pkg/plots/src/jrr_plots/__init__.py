"""Figure rendering for jrr experiment CSV output."""

__version__ = "0.1.0"

from jrr_plots.render import KINDS, FigureSpec, PlotError, SchemaError, read_rows, render

__all__ = ["KINDS", "FigureSpec", "PlotError", "SchemaError", "read_rows", "render"]
