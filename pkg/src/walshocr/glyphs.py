"""Stroke outlines for the shipped template set and its synthetic variants.

Each character is a list of strokes in a unit box (x right, y down). A stroke
is a line ``("L", x0, y0, x1, y1)`` or an elliptical arc
``("A", cx, cy, rx, ry, deg0, deg1)`` with angles measured counter-clockwise
from the +x axis as seen on screen. Rendering sweeps a round pen along the
strokes.
"""
from __future__ import annotations

import numpy as np

from .raster import crop_to_content, resample

_O = [("A", 0.5, 0.5, 0.5, 0.5, 0, 360)]
_P_BOWL = [
    ("L", 0, 0, 0, 1),
    ("L", 0, 0, 0.6, 0),
    ("A", 0.6, 0.27, 0.4, 0.27, 90, -90),
    ("L", 0.6, 0.54, 0, 0.54),
]

STROKES: dict[str, list[tuple]] = {
    "A": [("L", 0, 1, 0.5, 0), ("L", 0.5, 0, 1, 1), ("L", 0.19, 0.62, 0.81, 0.62)],
    "B": [
        ("L", 0, 0, 0, 1),
        ("L", 0, 0, 0.6, 0),
        ("A", 0.6, 0.24, 0.34, 0.24, 90, -90),
        ("L", 0.6, 0.48, 0, 0.48),
        ("L", 0.6, 0.48, 0.65, 0.48),
        ("A", 0.65, 0.74, 0.35, 0.26, 90, -90),
        ("L", 0.65, 1, 0, 1),
    ],
    "C": [("A", 0.5, 0.5, 0.5, 0.5, 45, 315)],
    "D": [
        ("L", 0, 0, 0, 1),
        ("L", 0, 0, 0.45, 0),
        ("A", 0.45, 0.5, 0.55, 0.5, 90, -90),
        ("L", 0.45, 1, 0, 1),
    ],
    "E": [("L", 0, 0, 0, 1), ("L", 0, 0, 1, 0), ("L", 0, 0.5, 0.8, 0.5), ("L", 0, 1, 1, 1)],
    "F": [("L", 0, 0, 0, 1), ("L", 0, 0, 1, 0), ("L", 0, 0.5, 0.8, 0.5)],
    "G": [("A", 0.5, 0.5, 0.5, 0.5, 40, 360), ("L", 1, 0.55, 0.55, 0.55), ("L", 1, 0.5, 1, 0.6)],
    "H": [("L", 0, 0, 0, 1), ("L", 1, 0, 1, 1), ("L", 0, 0.5, 1, 0.5)],
    "I": [("L", 0.5, 0, 0.5, 1), ("L", 0.1, 0, 0.9, 0), ("L", 0.1, 1, 0.9, 1)],
    "J": [
        ("L", 0.3, 0, 1, 0),
        ("L", 0.75, 0, 0.75, 0.7),
        ("A", 0.4, 0.7, 0.35, 0.3, 0, -180),
        ("L", 0.05, 0.7, 0.05, 0.6),
    ],
    "K": [("L", 0, 0, 0, 1), ("L", 1, 0, 0.02, 0.62), ("L", 0.35, 0.42, 1, 1)],
    "L": [("L", 0, 0, 0, 1), ("L", 0, 1, 1, 1)],
    "M": [("L", 0, 1, 0, 0), ("L", 0, 0, 0.5, 0.6), ("L", 0.5, 0.6, 1, 0), ("L", 1, 0, 1, 1)],
    "N": [("L", 0, 1, 0, 0), ("L", 0, 0, 1, 1), ("L", 1, 1, 1, 0)],
    "O": _O,
    "P": _P_BOWL,
    "Q": _O + [("L", 0.55, 0.7, 1, 1)],
    "R": _P_BOWL + [("L", 0.45, 0.54, 1, 1)],
    "S": [("A", 0.5, 0.25, 0.45, 0.25, 30, 270), ("A", 0.5, 0.75, 0.45, 0.25, 90, -150)],
    "T": [("L", 0, 0, 1, 0), ("L", 0.5, 0, 0.5, 1)],
    "U": [("L", 0, 0, 0, 0.6), ("A", 0.5, 0.6, 0.5, 0.4, 180, 360), ("L", 1, 0.6, 1, 0)],
    "V": [("L", 0, 0, 0.5, 1), ("L", 0.5, 1, 1, 0)],
    "W": [("L", 0, 0, 0.25, 1), ("L", 0.25, 1, 0.5, 0.35), ("L", 0.5, 0.35, 0.75, 1), ("L", 0.75, 1, 1, 0)],
    "X": [("L", 0, 0, 1, 1), ("L", 1, 0, 0, 1)],
    "Y": [("L", 0, 0, 0.5, 0.5), ("L", 1, 0, 0.5, 0.5), ("L", 0.5, 0.5, 0.5, 1)],
    "Z": [("L", 0, 0, 1, 0), ("L", 1, 0, 0, 1), ("L", 0, 1, 1, 1)],
    "1": [("L", 0.6, 0, 0.6, 1), ("L", 0.6, 0, 0.2, 0.25), ("L", 0.2, 1, 1, 1)],
    "2": [("A", 0.5, 0.3, 0.45, 0.3, 160, -30), ("L", 0.89, 0.45, 0, 1), ("L", 0, 1, 1, 1)],
    "3": [
        ("A", 0.5, 0.27, 0.45, 0.27, 150, -90),
        ("A", 0.5, 0.77, 0.47, 0.23, 90, -150),
        ("L", 0.3, 0.54, 0.5, 0.54),
    ],
    "4": [("L", 0.7, 0, 0.7, 1), ("L", 0.7, 0, 0, 0.7), ("L", 0, 0.7, 1, 0.7)],
    "5": [
        ("L", 0.15, 0, 0.95, 0),
        ("L", 0.15, 0, 0.1, 0.45),
        ("L", 0.1, 0.45, 0.13, 0.5),
        ("A", 0.5, 0.68, 0.45, 0.32, 145, -150),
    ],
    "6": [
        ("A", 0.5, 0.68, 0.45, 0.32, 0, 360),
        ("A", 0.6, 0.68, 0.55, 0.68, 180, 80),
        ("L", 0.05, 0.68, 0.3, 0.36),
    ],
    "7": [("L", 0, 0, 1, 0), ("L", 1, 0, 0.35, 1)],
    "8": [("A", 0.5, 0.25, 0.4, 0.25, 0, 360), ("A", 0.5, 0.74, 0.5, 0.26, 0, 360)],
    "9": [("A", 0.5, 0.32, 0.45, 0.32, 0, 360), ("A", 0.4, 0.32, 0.55, 0.68, 0, -100)],
    "0": [
        ("L", 0, 0.3, 0, 0.7),
        ("L", 1, 0.3, 1, 0.7),
        ("A", 0.5, 0.3, 0.5, 0.3, 0, 180),
        ("A", 0.5, 0.7, 0.5, 0.3, 180, 360),
    ],
}


def _stroke_points(stroke, step: float) -> np.ndarray:
    """Sample a stroke in unit coordinates at roughly ``step`` spacing."""
    kind, *args = stroke
    if kind == "L":
        x0, y0, x1, y1 = args
        n = max(2, int(np.hypot(x1 - x0, y1 - y0) / step) + 2)
        t = np.linspace(0.0, 1.0, n)
        return np.column_stack((x0 + (x1 - x0) * t, y0 + (y1 - y0) * t))
    if kind == "A":
        cx, cy, rx, ry, a0, a1 = args
        span = np.radians(abs(a1 - a0))
        n = max(2, int(span * max(rx, ry) / step) + 2)
        t = np.radians(np.linspace(a0, a1, n))
        return np.column_stack((cx + rx * np.cos(t), cy - ry * np.sin(t)))
    raise ValueError(f"unknown stroke kind {kind!r}")


def render(label: str, rows: int, cols: int, pen: float) -> np.ndarray:
    """Rasterize a character on a rows x cols canvas with pen radius ``pen`` pixels."""
    strokes = STROKES[label]
    span_x = cols - 2 * pen - 1
    span_y = rows - 2 * pen - 1
    step = 0.25 / max(span_x, span_y)
    pts = np.concatenate([_stroke_points(s, step) for s in strokes])
    px = pen + 0.5 + pts[:, 0] * span_x
    py = pen + 0.5 + pts[:, 1] * span_y
    yy, xx = np.mgrid[0:rows, 0:cols]
    cy = yy.ravel() + 0.5
    cx = xx.ravel() + 0.5
    ink = np.zeros(rows * cols, dtype=bool)
    # chunk over sample points to bound memory
    for i in range(0, len(px), 512):
        d2 = (cx[:, None] - px[None, i : i + 512]) ** 2 + (cy[:, None] - py[None, i : i + 512]) ** 2
        ink |= (d2 < pen * pen - 1e-9).any(axis=1)
    return ink.reshape(rows, cols).astype(np.uint8)


def template(label: str, scale: int = 4, pen: float = 1.9) -> np.ndarray:
    """Render at ``scale`` times the 42x24 raster, then normalize down to it."""
    big = render(label, 42 * scale, 24 * scale, pen * scale)
    return resample(crop_to_content(big), 42, 24)


def variant(label: str, rows: int, cols: int, pen: float, border: int = 3) -> np.ndarray:
    """Render on its own canvas size with a background border (not normalized)."""
    img = render(label, rows, cols, pen)
    return np.pad(img, border)
