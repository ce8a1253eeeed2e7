"""Batch renderer for aptomit figure-data CSV bundles."""

from .csvio import AxisInfo, SchemaError, Table, load_table
from .recipes import FigureRecipe, Line, Panel, recipe_for
from .render import render, render_figure, save

__version__ = "0.1.0"

__all__ = [
    "AxisInfo", "FigureRecipe", "Line", "Panel", "SchemaError", "Table",
    "load_table", "recipe_for", "render", "render_figure", "save",
]
