"""Reconstruction of curvature and topology from pixelations of planar sets."""
from .grid import Pixelation, rasterize
from .recover import ApproxConfig, Polytrapezoid, approximate, default_schedule
from .shapes import corpus, get_shape

__version__ = "0.1.0"

__all__ = [
    "Pixelation",
    "rasterize",
    "ApproxConfig",
    "Polytrapezoid",
    "approximate",
    "default_schedule",
    "corpus",
    "get_shape",
]
