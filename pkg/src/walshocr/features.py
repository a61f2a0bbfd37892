"""Glyph feature vectors and the template database.

Every glyph entering this module is a 42x24 ink=1 raster. The eleven
features are three row ink counts, three column ink counts, left-right and
top-bottom symmetry, the best-matching template under WHT correlation, the
number of enclosed background regions, and the sum of the ten.
"""
from __future__ import annotations

import json
import os
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from .raster import EmptyContentError, binarize, corr2, load_image
from .segmenter import GLYPH_COLS, GLYPH_ROWS, normalize_glyph
from .wht import SPECTRUM_SIZE, flatten, wht2d

LABELS: tuple[str, ...] = tuple("ABCDEFGHIJKLMNOPQRSTUVWXYZ") + tuple("1234567890")
FEATURE_NAMES = ("h30", "h50", "h80", "v30", "v50", "v80", "hsym", "vsym", "pos", "cc", "sumt")
LINE_FRACTIONS = (0.3, 0.5, 0.8)
DB_FORMAT = "walshocr-template-db"
DB_VERSION = 1


class DatabaseError(ValueError):
    pass


class FeatureVector(NamedTuple):
    h30: int
    h50: int
    h80: int
    v30: int
    v50: int
    v80: int
    hsym: float
    vsym: float
    pos: int
    cc: int
    sumt: float

    @classmethod
    def assemble(cls, h, v, hsym, vsym, pos, cc) -> "FeatureVector":
        parts = [*h, *v, hsym, vsym, pos, cc]
        total = 0.0
        for p in parts:
            total += p
        return cls(*h, *v, hsym, vsym, pos, cc, total)


def _glyph(glyph) -> np.ndarray:
    img = np.asarray(getattr(glyph, "image", glyph))
    if img.shape != (GLYPH_ROWS, GLYPH_COLS):
        raise ValueError(f"expected a {GLYPH_ROWS}x{GLYPH_COLS} glyph, got {img.shape}")
    return img


def line_index(c: float, size: int) -> int:
    """1-based row/column for fraction c of ``size``: round half up, clamped."""
    if not 0.0 < c < 1.0:
        raise ValueError(f"scale constant must lie in (0, 1), got {c}")
    return min(max(int(np.floor(c * size + 0.5)), 1), size)


def line_sum_h(glyph, c: float) -> int:
    img = _glyph(glyph)
    return int(img[line_index(c, img.shape[0]) - 1].sum())


def line_sum_v(glyph, c: float) -> int:
    img = _glyph(glyph)
    return int(img[:, line_index(c, img.shape[1]) - 1].sum())


def h_symmetry(glyph) -> float:
    """Correlation of the glyph with its left half reflected onto the right."""
    img = _glyph(glyph)
    half = img.shape[1] // 2
    x = img.copy()
    x[:, half:] = img[:, :half][:, ::-1]
    return max(0.0, corr2(img, x))


def v_symmetry(glyph) -> float:
    """Correlation of the glyph with its upper half reflected onto the lower."""
    img = _glyph(glyph)
    half = img.shape[0] // 2
    x = img.copy()
    x[half:] = img[:half][::-1]
    return max(0.0, corr2(img, x))


def wht_correlations(glyph, spectra) -> np.ndarray:
    flat = flatten(wht2d(_glyph(glyph)))
    return np.array([corr2(flat, s) for s in np.asarray(spectra)])


def wht_pos(glyph, db: "TemplateDatabase | np.ndarray") -> int:
    """1-based index of the template spectrum best correlated with the glyph's."""
    spectra = db.spectra if isinstance(db, TemplateDatabase) else db
    return int(np.argmax(wht_correlations(glyph, spectra))) + 1


def closed_areas(glyph) -> int:
    """Count 4-connected background regions that do not reach the border."""
    img = np.asarray(getattr(glyph, "image", glyph))
    rows, cols = img.shape
    labels = np.zeros((rows, cols), dtype=np.int32)
    holes = 0
    next_label = 0
    for r in range(rows):
        for c in range(cols):
            if img[r, c] or labels[r, c]:
                continue
            next_label += 1
            labels[r, c] = next_label
            touches = False
            queue = deque([(r, c)])
            while queue:
                i, j = queue.popleft()
                if i == 0 or j == 0 or i == rows - 1 or j == cols - 1:
                    touches = True
                for ni, nj in ((i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)):
                    if 0 <= ni < rows and 0 <= nj < cols and not img[ni, nj] and not labels[ni, nj]:
                        labels[ni, nj] = next_label
                        queue.append((ni, nj))
            if not touches:
                holes += 1
    return holes


def feature_vector(glyph, db: "TemplateDatabase | np.ndarray") -> FeatureVector:
    img = _glyph(glyph)
    return FeatureVector.assemble(
        [line_sum_h(img, c) for c in LINE_FRACTIONS],
        [line_sum_v(img, c) for c in LINE_FRACTIONS],
        h_symmetry(img),
        v_symmetry(img),
        wht_pos(img, db),
        closed_areas(img),
    )


# --------------------------------------------------------------------------
# template database
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TemplateDatabase:
    labels: tuple[str, ...]
    templates: np.ndarray  # (36, 42, 24) uint8
    vectors: tuple[FeatureVector, ...]
    spectra: np.ndarray  # (36, 2048) float64

    def matrix(self) -> np.ndarray:
        """The 11x36 feature matrix, one column per class."""
        return np.array(self.vectors, dtype=np.float64).T

    def index(self, label: str) -> int:
        return self.labels.index(label)


def glyph_from_file(path) -> np.ndarray:
    """Load one glyph image and take it to the normalized 42x24 raster."""
    binary = binarize(load_image(path))
    try:
        return normalize_glyph(binary).image
    except EmptyContentError:
        raise EmptyContentError(f"{os.fspath(path)}: glyph image has no ink") from None


def find_label_files(directory, labels: Sequence[str] = LABELS) -> dict[str, Path]:
    """Map each label to its ``<label>.pbm`` / ``<label>.pgm`` file in ``directory``."""
    directory = Path(directory)
    if not directory.is_dir():
        raise DatabaseError(f"{directory} is not a directory")
    found: dict[str, list[Path]] = {label: [] for label in labels}
    for entry in sorted(directory.iterdir()):
        if entry.suffix.lower() in (".pbm", ".pgm") and entry.stem in found:
            found[entry.stem].append(entry)
    missing = [label for label, paths in found.items() if not paths]
    if missing:
        raise DatabaseError(f"{directory}: missing glyph file(s) for label(s) {', '.join(missing)}")
    dupes = [label for label, paths in found.items() if len(paths) > 1]
    if dupes:
        raise DatabaseError(f"{directory}: duplicate glyph files for label(s) {', '.join(dupes)}")
    return {label: paths[0] for label, paths in found.items()}


def database_from_templates(templates: np.ndarray, labels: Sequence[str] = LABELS) -> TemplateDatabase:
    templates = np.asarray(templates, dtype=np.uint8)
    spectra = np.array([flatten(wht2d(t)) for t in templates])
    vectors = tuple(feature_vector(t, spectra) for t in templates)
    return TemplateDatabase(tuple(labels), templates, vectors, spectra)


def build_database(template_dir) -> TemplateDatabase:
    files = find_label_files(template_dir)
    templates = np.array([glyph_from_file(files[label]) for label in LABELS], dtype=np.uint8)
    return database_from_templates(templates)


def _json_row(values) -> str:
    return json.dumps([v.item() if isinstance(v, np.generic) else v for v in values], separators=(",", ":"))


def dumps_database(db: TemplateDatabase) -> str:
    int_rows = {0, 1, 2, 3, 4, 5, 8, 9}
    matrix_rows = []
    for i, name in enumerate(FEATURE_NAMES):
        column = [v[i] for v in db.vectors]
        column = [int(x) for x in column] if i in int_rows else [float(x) for x in column]
        matrix_rows.append(f'    "{name}": {_json_row(column)}')
    templates = []
    for label, tpl in zip(db.labels, db.templates):
        rows = ",\n".join(f'      "{"".join(map(str, row))}"' for row in tpl.tolist())
        templates.append(f'    "{label}": [\n{rows}\n    ]')
    spectra = [f'    "{label}": {_json_row(s.tolist())}' for label, s in zip(db.labels, db.spectra)]
    return (
        "{\n"
        f'  "format": "{DB_FORMAT}",\n'
        f'  "version": {DB_VERSION},\n'
        f'  "labels": {_json_row(list(db.labels))},\n'
        f'  "glyph_shape": [{GLYPH_ROWS},{GLYPH_COLS}],\n'
        '  "templates": {\n' + ",\n".join(templates) + "\n  },\n"
        '  "vectors": {\n' + ",\n".join(matrix_rows) + "\n  },\n"
        '  "spectra": {\n' + ",\n".join(spectra) + "\n  }\n"
        "}\n"
    )


def save_database(db: TemplateDatabase, path) -> None:
    Path(path).write_text(dumps_database(db), encoding="utf-8")


def load_database(path) -> TemplateDatabase:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError) as exc:
        raise DatabaseError(f"cannot read database {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DatabaseError(f"{path}: malformed database file ({exc})") from exc
    if not isinstance(doc, dict) or doc.get("format") != DB_FORMAT:
        raise DatabaseError(f"{path}: not a template database")
    if doc.get("version") != DB_VERSION:
        raise DatabaseError(f"{path}: unsupported database version {doc.get('version')!r}")
    try:
        labels = tuple(doc["labels"])
        templates = np.array(
            [[[int(ch) for ch in row] for row in doc["templates"][label]] for label in labels],
            dtype=np.uint8,
        )
        columns = [doc["vectors"][name] for name in FEATURE_NAMES]
        vectors = tuple(FeatureVector(*(col[i] for col in columns)) for i in range(len(labels)))
        spectra = np.array([doc["spectra"][label] for label in labels], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as exc:
        raise DatabaseError(f"{path}: malformed database file ({exc!r})") from exc
    if templates.shape != (len(labels), GLYPH_ROWS, GLYPH_COLS):
        raise DatabaseError(f"{path}: template shape {templates.shape} does not match labels")
    if spectra.shape != (len(labels), SPECTRUM_SIZE):
        raise DatabaseError(f"{path}: spectra shape {spectra.shape} does not match labels")
    return TemplateDatabase(labels, templates, vectors, spectra)
