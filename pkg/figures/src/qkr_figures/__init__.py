"""Paper-style figures rendered from qkr CSV data files."""

__version__ = "0.1.0"

from .figures import FigureSpec, SchemaError, build_figure, plot

__all__ = ["FigureSpec", "SchemaError", "build_figure", "plot", "__version__"]
