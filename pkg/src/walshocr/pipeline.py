"""End-to-end recognition and per-font evaluation."""
from __future__ import annotations

import csv
import io
import logging
from collections import Counter
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path

import numpy as np

from . import ann
from .features import (
    LABELS,
    DatabaseError,
    FeatureVector,
    TemplateDatabase,
    feature_vector,
    find_label_files,
    glyph_from_file,
)
from .raster import EmptyContentError, ImageFormatError, binarize, load_image
from .segmenter import crop_roi, normalize_glyph, segment_page, space_positions

log = logging.getLogger(__name__)


@dataclass
class GlyphResult:
    line_index: int
    glyph_index: int
    label: str
    confidence: float
    runner_up: str
    features: FeatureVector
    row_span: tuple[int, int]
    col_span: tuple[int, int]


@dataclass
class RecognitionResult:
    lines: list[str] = field(default_factory=list)
    per_glyph: list[GlyphResult] = field(default_factory=list)

    @property
    def text(self) -> str:
        return "\n".join(self.lines)


def recognize_page(
    page: np.ndarray,
    model: ann.MlpModel,
    db: TemplateDatabase,
    roi: tuple[int, int, int, int] | None = None,
    spaces: bool = False,
) -> RecognitionResult:
    """Recognize a binary page: segment, normalize, extract features, classify."""
    if roi is not None:
        page = crop_roi(page, roi)
    result = RecognitionResult()
    for boxes in segment_page(page):
        gaps = space_positions(boxes) if spaces else set()
        chars = []
        for box in boxes:
            glyph = normalize_glyph(box)
            fv = feature_vector(glyph.image, db)
            label, conf, runner = ann.classify(model, fv)
            if box.glyph_index in gaps:
                chars.append(" ")
            chars.append(label)
            result.per_glyph.append(
                GlyphResult(box.line_index, box.glyph_index, label, conf, runner, fv, box.row_span, box.col_span)
            )
        result.lines.append("".join(chars))
    return result


def recognize_file(path, model, db, roi=None, spaces=False) -> RecognitionResult:
    return recognize_page(binarize(load_image(path)), model, db, roi=roi, spaces=spaces)


def classify_glyph_file(path, model: ann.MlpModel, db: TemplateDatabase) -> tuple[str, float, str]:
    return ann.classify(model, feature_vector(glyph_from_file(path), db))


# --------------------------------------------------------------------------
# evaluation
# --------------------------------------------------------------------------

def rate_percent(correct: int, total: int) -> Decimal:
    """100 * correct / total rounded half-up to two decimals."""
    if total <= 0:
        raise ValueError("total must be positive")
    return (Decimal(100 * correct) / Decimal(total)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP)


@dataclass(frozen=True)
class FontScore:
    font: str
    correct: int
    total: int

    @property
    def rate(self) -> Decimal:
        return rate_percent(self.correct, self.total)


@dataclass
class EvalReport:
    rows: list[FontScore] = field(default_factory=list)
    skipped: list[tuple[str, str]] = field(default_factory=list)
    confusions: Counter = field(default_factory=Counter)

    def sorted_rows(self) -> list[FontScore]:
        return sorted(self.rows, key=lambda r: (-r.rate, r.font))

    @property
    def aggregate(self) -> FontScore:
        return FontScore("ALL", sum(r.correct for r in self.rows), sum(r.total for r in self.rows))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["font", "correct", "total", "rate_percent"])
        for r in self.sorted_rows():
            w.writerow([r.font, r.correct, r.total, str(r.rate)])
        if self.rows:
            agg = self.aggregate
            w.writerow([agg.font, agg.correct, agg.total, str(agg.rate)])
        for name, _reason in self.skipped:
            w.writerow([name, 0, 0, "skipped"])
        return buf.getvalue()

    def top_confusions(self, n: int = 10) -> list[tuple[tuple[str, str], int]]:
        return sorted(self.confusions.items(), key=lambda kv: (-kv[1], kv[0]))[:n]


def evaluate_fonts(fonts_root, model: ann.MlpModel, db: TemplateDatabase) -> EvalReport:
    """Classify every glyph of every font directory under ``fonts_root``."""
    report = EvalReport()
    for font_dir in sorted(p for p in Path(fonts_root).iterdir() if p.is_dir()):
        try:
            files = find_label_files(font_dir)
            glyphs = {label: glyph_from_file(files[label]) for label in LABELS}
        except (DatabaseError, ImageFormatError, EmptyContentError) as exc:
            log.warning("skipping font %s: %s", font_dir.name, exc)
            report.skipped.append((font_dir.name, str(exc)))
            continue
        correct = 0
        for label in LABELS:
            predicted, _, _ = ann.classify(model, feature_vector(glyphs[label], db))
            if predicted == label:
                correct += 1
            else:
                report.confusions[(label, predicted)] += 1
        report.rows.append(FontScore(font_dir.name, correct, len(LABELS)))
    return report
