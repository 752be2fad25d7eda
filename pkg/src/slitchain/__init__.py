"""Chordal Loewner evolution, kinetic moment chains, and dKP hierarchy checks."""

__version__ = "0.1.0"

from . import errors, exact, faber, hierarchy, kinetic, loewner, reduction, series

__all__ = [
    "errors",
    "exact",
    "faber",
    "hierarchy",
    "kinetic",
    "loewner",
    "reduction",
    "series",
    "__version__",
]
