"""Raster primitives: netpbm I/O, binarization, cropping, resampling, mirroring.

Images are plain 2-D numpy arrays. Gray images are ``uint8`` intensities;
binary images are ``uint8`` arrays holding 1 for ink and 0 for background,
whatever the polarity of the source file.
"""
from __future__ import annotations

import os
from typing import Union

import numpy as np

PathLike = Union[str, "os.PathLike[str]"]

__all__ = [
    "ImageFormatError",
    "EmptyContentError",
    "load_image",
    "write_pbm",
    "write_pgm",
    "otsu_threshold",
    "binarize",
    "content_bounds",
    "crop_to_content",
    "resample",
    "mirror_h",
    "mirror_v",
    "corr2",
]


class ImageFormatError(ValueError):
    """Raised for unreadable or malformed netpbm data."""


class EmptyContentError(ValueError):
    """Raised when an operation needs at least one ink pixel and finds none."""


# --------------------------------------------------------------------------
# netpbm reading / writing
# --------------------------------------------------------------------------

_WHITESPACE = b" \t\r\n\v\f"
_SEPARATORS = _WHITESPACE + b"#"


def _skip_space(data: bytes, pos: int) -> int:
    """Advance past whitespace and '#' comments."""
    while pos < len(data) and data[pos] in _SEPARATORS:
        if data[pos] == ord("#"):
            end = data.find(b"\n", pos)
            pos = len(data) if end < 0 else end + 1
        else:
            pos += 1
    return pos


class _HeaderReader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def skip(self):
        self.pos = _skip_space(self.data, self.pos)

    def token(self, what: str) -> bytes:
        self.skip()
        start = self.pos
        while self.pos < len(self.data) and self.data[self.pos] not in _SEPARATORS:
            self.pos += 1
        if start == self.pos:
            raise ImageFormatError(f"expected {what} at byte {start}, found end of data")
        return self.data[start : self.pos]

    def integer(self, what: str) -> int:
        start = self.pos
        tok = self.token(what)
        if not tok.isdigit():
            raise ImageFormatError(f"expected {what} at byte {start}, got {tok[:16]!r}")
        return int(tok)


def _parse_netpbm(data: bytes) -> np.ndarray:
    if len(data) < 2:
        raise ImageFormatError("truncated header at byte 0: missing magic number")
    magic = data[:2]
    if magic not in (b"P1", b"P2", b"P4", b"P5"):
        raise ImageFormatError(f"unsupported magic number {magic!r} at byte 0")
    hdr = _HeaderReader(data)
    hdr.pos = 2
    cols = hdr.integer("width")
    rows = hdr.integer("height")
    if rows < 1 or cols < 1:
        raise ImageFormatError(f"image dimensions must be positive, got {cols}x{rows} (byte {hdr.pos})")
    is_bitmap = magic in (b"P1", b"P4")
    maxval = 1
    if not is_bitmap:
        maxval_pos = hdr.pos
        maxval = hdr.integer("maxval")
        if not 1 <= maxval <= 255:
            raise ImageFormatError(f"maxval {maxval} at byte {maxval_pos} outside 1..255")

    count = rows * cols
    if magic == b"P4":
        # exactly one whitespace byte separates header and raster
        start = hdr.pos + 1
        stride = (cols + 7) // 8
        need = stride * rows
        raw = data[start : start + need]
        if len(raw) < need:
            raise ImageFormatError(
                f"truncated pixel data at byte {start + len(raw)}: expected {need} bytes, got {len(raw)}"
            )
        bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8).reshape(rows, stride), axis=1)[:, :cols]
        values = bits
    elif magic == b"P5":
        start = hdr.pos + 1
        raw = data[start : start + count]
        if len(raw) < count:
            raise ImageFormatError(
                f"truncated pixel data at byte {start + len(raw)}: expected {count} bytes, got {len(raw)}"
            )
        values = np.frombuffer(raw, dtype=np.uint8).reshape(rows, cols)
    elif magic == b"P1":
        # ASCII bitmaps may pack digits without separators
        out = np.empty(count, dtype=np.uint8)
        n = 0
        pos = hdr.pos
        while n < count:
            pos = _skip_space(data, pos)
            if pos >= len(data):
                raise ImageFormatError(f"truncated pixel data at byte {pos}: got {n} of {count} pixels")
            ch = data[pos : pos + 1]
            if ch not in (b"0", b"1"):
                raise ImageFormatError(f"invalid bitmap value {ch!r} at byte {pos}")
            out[n] = ch == b"1"
            n += 1
            pos += 1
        values = out.reshape(rows, cols)
    else:  # P2
        out = np.empty(count, dtype=np.uint8)
        for n in range(count):
            start = hdr.pos
            try:
                v = hdr.integer("pixel value")
            except ImageFormatError:
                raise ImageFormatError(
                    f"truncated pixel data at byte {start}: got {n} of {count} pixels"
                ) from None
            if v > maxval:
                raise ImageFormatError(f"pixel value {v} exceeds maxval {maxval} at byte {start}")
            out[n] = v
        values = out.reshape(rows, cols)

    if is_bitmap:
        # PBM: 1 is black
        return np.where(values == 1, 0, 255).astype(np.uint8)
    if maxval != 255:
        values = np.floor(values.astype(np.float64) * 255.0 / maxval + 0.5).astype(np.uint8)
    return np.ascontiguousarray(values, dtype=np.uint8)


def load_image(path: PathLike) -> np.ndarray:
    """Read a PBM (P1/P4) or PGM (P2/P5) file into a uint8 gray image.

    PBM black pixels become intensity 0 and white pixels 255.
    """
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise ImageFormatError(f"cannot read {os.fspath(path)}: {exc.strerror or exc}") from exc
    try:
        return _parse_netpbm(data)
    except ImageFormatError as exc:
        raise ImageFormatError(f"{os.fspath(path)}: {exc}") from None


def _pbm_bytes(binary: np.ndarray, plain: bool) -> bytes:
    img = np.asarray(binary, dtype=np.uint8)
    rows, cols = img.shape
    if plain:
        lines = ["".join("1" if v else "0" for v in row) for row in img]
        return (f"P1\n{cols} {rows}\n" + "\n".join(lines) + "\n").encode("ascii")
    packed = np.packbits(img.astype(bool), axis=1)
    return f"P4\n{cols} {rows}\n".encode("ascii") + packed.tobytes()


def write_pbm(path: PathLike, binary: np.ndarray, plain: bool = True) -> None:
    """Write an ink=1 binary image as PBM (ink is written black)."""
    with open(path, "wb") as fh:
        fh.write(_pbm_bytes(binary, plain))


def write_pgm(path: PathLike, gray: np.ndarray, plain: bool = True) -> None:
    img = np.asarray(gray, dtype=np.uint8)
    rows, cols = img.shape
    if plain:
        body = "\n".join(" ".join(str(int(v)) for v in row) for row in img)
        data = f"P2\n{cols} {rows}\n255\n{body}\n".encode("ascii")
    else:
        data = f"P5\n{cols} {rows}\n255\n".encode("ascii") + img.tobytes()
    with open(path, "wb") as fh:
        fh.write(data)


# --------------------------------------------------------------------------
# binarization
# --------------------------------------------------------------------------

def otsu_threshold(gray: np.ndarray) -> int:
    """Return T in 1..255 maximizing between-class variance of {< T} vs {>= T}.

    Ties resolve to the smallest T.
    """
    hist = np.bincount(np.asarray(gray, dtype=np.uint8).ravel(), minlength=256).astype(np.float64)
    total = hist.sum()
    levels = np.arange(256, dtype=np.float64)
    # w0[t-1], sum0[t-1]: weight and first moment of intensities < t
    w0 = np.cumsum(hist)[:-1]
    sum0 = np.cumsum(hist * levels)[:-1]
    w1 = total - w0
    sum1 = (hist * levels).sum() - sum0
    with np.errstate(divide="ignore", invalid="ignore"):
        mu0 = np.where(w0 > 0, sum0 / w0, 0.0)
        mu1 = np.where(w1 > 0, sum1 / w1, 0.0)
    between = np.where((w0 > 0) & (w1 > 0), w0 * w1 * (mu0 - mu1) ** 2, 0.0)
    return int(np.argmax(between)) + 1


def binarize(gray: np.ndarray, threshold: int | None = None) -> np.ndarray:
    """Threshold to ink=1 and flip polarity when ink covers more than half the image."""
    img = np.asarray(gray)
    if threshold is None:
        threshold = otsu_threshold(img)
    ink = (img < threshold).astype(np.uint8)
    if 2 * int(ink.sum()) > ink.size:
        ink ^= 1
    return ink


# --------------------------------------------------------------------------
# geometry
# --------------------------------------------------------------------------

def content_bounds(binary: np.ndarray) -> tuple[int, int, int, int]:
    """Inclusive (row0, row1, col0, col1) of the ink bounding box."""
    img = np.asarray(binary)
    rows = np.flatnonzero(img.any(axis=1))
    if rows.size == 0:
        raise EmptyContentError("image has no ink pixels")
    cols = np.flatnonzero(img.any(axis=0))
    return int(rows[0]), int(rows[-1]), int(cols[0]), int(cols[-1])


def crop_to_content(binary: np.ndarray) -> np.ndarray:
    r0, r1, c0, c1 = content_bounds(binary)
    return np.array(binary[r0 : r1 + 1, c0 : c1 + 1], dtype=np.uint8)


def resample(binary: np.ndarray, out_rows: int, out_cols: int) -> np.ndarray:
    """Nearest-neighbour resize: out[r, c] = in[r*rows//out_rows, c*cols//out_cols]."""
    if out_rows < 1 or out_cols < 1:
        raise ValueError(f"output size must be positive, got {out_rows}x{out_cols}")
    img = np.asarray(binary)
    rows, cols = img.shape
    ri = (np.arange(out_rows) * rows) // out_rows
    ci = (np.arange(out_cols) * cols) // out_cols
    return np.array(img[np.ix_(ri, ci)], dtype=img.dtype)


def mirror_h(img: np.ndarray) -> np.ndarray:
    """Reverse column order."""
    return np.array(np.asarray(img)[:, ::-1])


def mirror_v(img: np.ndarray) -> np.ndarray:
    """Reverse row order."""
    return np.array(np.asarray(img)[::-1, :])


def corr2(a, b) -> float:
    """Pearson correlation over all cells of two equally shaped grids.

    If either grid is constant the result is 1.0 when the grids are equal
    cell for cell and 0.0 otherwise.
    """
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"corr2 needs equal shapes, got {x.shape} and {y.shape}")
    x = x.ravel()
    y = y.ravel()
    if x.size == 0 or np.all(x == x[0]) or np.all(y == y[0]):
        return 1.0 if np.array_equal(x, y) else 0.0
    xc = x - x.mean()
    yc = y - y.mean()
    r = float(np.dot(xc, yc) / np.sqrt(np.dot(xc, xc) * np.dot(yc, yc)))
    return max(-1.0, min(1.0, r))
