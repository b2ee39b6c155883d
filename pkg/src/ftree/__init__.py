"""Computable invariants of surfaces and handlebody links in the 3-sphere."""

__version__ = "0.1.0"

from .errors import DiagramError, FtreeError, MalformedWordError, ResourceLimitError

__all__ = [
    "DiagramError",
    "FtreeError",
    "MalformedWordError",
    "ResourceLimitError",
    "__version__",
]
