"""Figure renderers for sweep outputs produced by the islsim CLI."""

__version__ = "0.1.0"

from .io import ResultsError, Table, read_table
from .render import FIGURES, Renderer, main

__all__ = ["FIGURES", "Renderer", "ResultsError", "Table", "main", "read_table"]
