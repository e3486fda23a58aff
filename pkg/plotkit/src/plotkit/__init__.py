"""Figure rendering for simulator result CSVs."""

from .aggregate import ecdf, line_sweep, mean, std_error, traces
from .figures import (
    CDF,
    KINDS,
    LINE_SWEEP,
    PRESETS,
    TRACE,
    FigureSpec,
    SpecError,
    load_spec,
    preset_specs,
    render,
    style_path,
)
from .tables import DataError, column, floats, load_table

__version__ = "0.1.0"

__all__ = [
    "CDF",
    "DataError",
    "FigureSpec",
    "KINDS",
    "LINE_SWEEP",
    "PRESETS",
    "SpecError",
    "TRACE",
    "__version__",
    "column",
    "ecdf",
    "floats",
    "line_sweep",
    "load_spec",
    "load_table",
    "mean",
    "preset_specs",
    "render",
    "std_error",
    "style_path",
    "traces",
]
