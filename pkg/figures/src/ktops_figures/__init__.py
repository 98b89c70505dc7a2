"""Static figure renderer for the kicked-top experiment CSV outputs."""

from .io import SCHEMAS, SchemaError, detect_kind, load_columns
from .render import KINDS, FigureSpec, render

__version__ = "0.1.0"
