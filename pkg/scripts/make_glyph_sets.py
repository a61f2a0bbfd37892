"""Regenerate the shipped glyph rasters under src/walshocr/data/.

templates/     42x24 tight plain PBM, one per label (training set)
fonts/bold/    heavier pen on a 63x36 canvas, binary PBM
fonts/thin/    lighter pen on an 84x48 canvas, binary PGM with gray levels
"""
from pathlib import Path

import numpy as np

from walshocr.features import LABELS
from walshocr.glyphs import template, variant
from walshocr.raster import write_pbm, write_pgm

DATA = Path(__file__).resolve().parents[1] / "src" / "walshocr" / "data"


def main():
    tdir = DATA / "templates"
    bold = DATA / "fonts" / "bold"
    thin = DATA / "fonts" / "thin"
    for d in (tdir, bold, thin):
        d.mkdir(parents=True, exist_ok=True)
    for label in LABELS:
        write_pbm(tdir / f"{label}.pbm", template(label), plain=True)
        write_pbm(bold / f"{label}.pbm", variant(label, 63, 36, pen=4.2), plain=False)
        ink = variant(label, 84, 48, pen=2.2)
        write_pgm(thin / f"{label}.pgm", np.where(ink == 1, 40, 220).astype(np.uint8), plain=False)


if __name__ == "__main__":
    main()
