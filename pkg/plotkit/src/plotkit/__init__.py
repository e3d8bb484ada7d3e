"""Render dirsec benchmark CSVs into figure files."""

from plotkit.kit import (CSV_COLUMNS, CSV_HEADER, FIGURE_KINDS,
                         EmptyGroupError, FigureModel, PlotKitError,
                         PlotSpec, RenderResult, Row, SchemaError,
                         SeriesModel, SpecError, draw, extract_model,
                         read_rows, render, spec_from_json)

__all__ = [
    "CSV_COLUMNS", "CSV_HEADER", "FIGURE_KINDS", "EmptyGroupError",
    "FigureModel", "PlotKitError", "PlotSpec", "RenderResult", "Row",
    "SchemaError", "SeriesModel", "SpecError", "draw", "extract_model",
    "read_rows", "render", "spec_from_json",
]
