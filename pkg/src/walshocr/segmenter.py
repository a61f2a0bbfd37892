"""Projection-profile segmentation of a page into lines and glyphs."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .raster import content_bounds, crop_to_content, resample

GLYPH_ROWS = 42
GLYPH_COLS = 24


@dataclass(frozen=True)
class GlyphBox:
    line_index: int
    glyph_index: int
    row_span: tuple[int, int]  # inclusive, page coordinates
    col_span: tuple[int, int]
    image: np.ndarray

    @property
    def width(self) -> int:
        return self.col_span[1] - self.col_span[0] + 1


@dataclass(frozen=True)
class NormalizedGlyph:
    image: np.ndarray
    origin: GlyphBox | None = None


def ink_runs(profile) -> list[tuple[int, int]]:
    """Inclusive (start, end) of maximal runs where the profile is nonzero."""
    mask = np.asarray(profile) > 0
    if not mask.any():
        return []
    edges = np.diff(np.concatenate(([0], mask.astype(np.int8), [0])))
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1) - 1
    return [(int(s), int(e)) for s, e in zip(starts, ends)]


def line_spans(page) -> list[tuple[int, int]]:
    return ink_runs(np.asarray(page).sum(axis=1))


def split_lines(page) -> list[np.ndarray]:
    """Line strips (full page width), top to bottom."""
    img = np.asarray(page)
    return [np.array(img[r0 : r1 + 1]) for r0, r1 in line_spans(img)]


def split_glyphs(line, line_index: int = 0, row_offset: int = 0, col_offset: int = 0) -> list[GlyphBox]:
    """Glyphs of one line strip, left to right, each cropped tight vertically.

    Offsets translate the spans into page coordinates when ``line`` is a strip.
    """
    img = np.asarray(line)
    boxes = []
    for c0, c1 in ink_runs(img.sum(axis=0)):
        column = img[:, c0 : c1 + 1]
        r0, r1, _, _ = content_bounds(column)
        boxes.append(
            GlyphBox(
                line_index=line_index,
                glyph_index=len(boxes),
                row_span=(row_offset + r0, row_offset + r1),
                col_span=(col_offset + c0, col_offset + c1),
                image=np.array(column[r0 : r1 + 1], dtype=np.uint8),
            )
        )
    return boxes


def segment_page(page) -> list[list[GlyphBox]]:
    img = np.asarray(page)
    return [
        split_glyphs(img[r0 : r1 + 1], line_index=i, row_offset=r0)
        for i, (r0, r1) in enumerate(line_spans(img))
    ]


def normalize_glyph(box: GlyphBox | np.ndarray) -> NormalizedGlyph:
    """Crop to content and resample to the 42x24 template raster."""
    if isinstance(box, GlyphBox):
        image, origin = box.image, box
    else:
        image, origin = box, None
    return NormalizedGlyph(resample(crop_to_content(image), GLYPH_ROWS, GLYPH_COLS), origin)


def space_positions(boxes: list[GlyphBox], factor: float = 0.5) -> set[int]:
    """Indices i such that a word space precedes boxes[i].

    A gap counts as a space when it is at least ``factor`` times the median
    glyph width of the line.
    """
    if len(boxes) < 2:
        return set()
    threshold = factor * float(np.median([b.width for b in boxes]))
    return {
        i
        for i in range(1, len(boxes))
        if boxes[i].col_span[0] - boxes[i - 1].col_span[1] - 1 >= threshold
    }


def crop_roi(page, roi: tuple[int, int, int, int]) -> np.ndarray:
    """Crop (x, y, w, h); x is the column, y the row of the top-left corner."""
    x, y, w, h = roi
    img = np.asarray(page)
    if w < 1 or h < 1 or x < 0 or y < 0 or x + w > img.shape[1] or y + h > img.shape[0]:
        raise ValueError(f"region {roi} outside the {img.shape[1]}x{img.shape[0]} page")
    return np.array(img[y : y + h, x : x + w])
