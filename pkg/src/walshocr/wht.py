"""Fast Walsh-Hadamard transform with sequency ordering.

All transforms are orthonormal (scaled by 1/sqrt(N) per axis), so they are
involutions and preserve energy.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

GLYPH_SHAPE = (42, 24)
SPECTRUM_SHAPE = (64, 32)
SPECTRUM_SIZE = SPECTRUM_SHAPE[0] * SPECTRUM_SHAPE[1]


def _check_pow2(n: int) -> int:
    if n < 1 or n & (n - 1):
        raise ValueError(f"length must be a power of two, got {n}")
    return n.bit_length() - 1


def fwht1d(v) -> np.ndarray:
    """Orthonormal Hadamard transform in natural order.

    The butterflies only add and subtract; the 1/sqrt(N) scale is applied once.
    """
    x = np.array(v, dtype=np.float64)
    n = x.shape[0]
    _check_pow2(n)
    h = 1
    while h < n:
        x = x.reshape(-1, 2, h)
        x = np.stack((x[:, 0] + x[:, 1], x[:, 0] - x[:, 1]), axis=1)
        h *= 2
    return x.reshape(n) / np.sqrt(n)


def _fwht_axis(a: np.ndarray, axis: int) -> np.ndarray:
    a = np.moveaxis(np.array(a, dtype=np.float64), axis, -1)
    n = a.shape[-1]
    _check_pow2(n)
    lead = a.shape[:-1]
    h = 1
    while h < n:
        a = a.reshape(*lead, -1, 2, h)
        a = np.stack((a[..., 0, :] + a[..., 1, :], a[..., 0, :] - a[..., 1, :]), axis=-2)
        h *= 2
    return np.moveaxis(a.reshape(*lead, n) / np.sqrt(n), -1, axis)


@lru_cache(maxsize=None)
def sequency_permutation(n: int) -> np.ndarray:
    """perm[s] = natural index of the Walsh function with s sign changes.

    Natural index k has sequency gray_decode(bit_reverse(k)); this is the
    inverse of that map.
    """
    bits = _check_pow2(n)
    seq_of = np.empty(n, dtype=np.int64)
    for k in range(n):
        rev = int(format(k, f"0{bits}b")[::-1], 2) if bits else 0
        s = 0
        while rev:
            s ^= rev
            rev >>= 1
        seq_of[k] = s
    perm = np.empty(n, dtype=np.int64)
    perm[seq_of] = np.arange(n)
    perm.setflags(write=False)
    return perm


def sequency_of(n: int) -> np.ndarray:
    """seq[k] = sequency position of natural index k."""
    perm = sequency_permutation(n)
    out = np.empty(n, dtype=np.int64)
    out[perm] = np.arange(n)
    return out


def to_sequency(v) -> np.ndarray:
    x = np.asarray(v, dtype=np.float64)
    return x[sequency_permutation(x.shape[0])]


@dataclass(frozen=True)
class WhtSpectrum:
    """Sequency-ordered 64x32 spectrum of a zero-padded 42x24 glyph."""

    coefficients: np.ndarray
    source_dims: tuple[int, int] = GLYPH_SHAPE

    @property
    def rows(self) -> int:
        return self.coefficients.shape[0]

    @property
    def cols(self) -> int:
        return self.coefficients.shape[1]

    def energy(self) -> float:
        return float(np.sum(self.coefficients**2))


def wht2d(glyph) -> WhtSpectrum:
    img = np.asarray(glyph)
    if img.shape != GLYPH_SHAPE:
        raise ValueError(f"wht2d expects a {GLYPH_SHAPE[0]}x{GLYPH_SHAPE[1]} glyph, got {img.shape}")
    grid = np.zeros(SPECTRUM_SHAPE, dtype=np.float64)
    grid[: GLYPH_SHAPE[0], : GLYPH_SHAPE[1]] = img
    coeffs = _fwht_axis(_fwht_axis(grid, 1), 0)
    rp = sequency_permutation(SPECTRUM_SHAPE[0])
    cp = sequency_permutation(SPECTRUM_SHAPE[1])
    return WhtSpectrum(coeffs[np.ix_(rp, cp)])


def flatten(spectrum: WhtSpectrum, keep: int | None = None) -> np.ndarray:
    """Row-major coefficient vector; ``keep`` zeroes every entry from that index on."""
    flat = spectrum.coefficients.reshape(-1).copy()
    if keep is not None:
        flat[keep:] = 0.0
    return flat


def unflatten(flat, shape: tuple[int, int] = SPECTRUM_SHAPE) -> WhtSpectrum:
    return WhtSpectrum(np.asarray(flat, dtype=np.float64).reshape(shape).copy())
