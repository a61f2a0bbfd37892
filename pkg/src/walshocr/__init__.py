"""Feature-vector optical character recognition for capital letters and digits.

Glyphs are segmented from a binarized page, normalized to a 42x24 raster and
described by eleven features (line ink counts, symmetry, Walsh-Hadamard
template match, hole count and their sum), which a small backpropagation
network maps to one of 36 classes.
"""
from importlib.resources import files

__version__ = "0.1.0"


def data_path(*parts: str):
    """Path to shipped data, e.g. ``data_path("templates")``."""
    return files(__name__).joinpath("data", *parts)
