"""Normalized per-measure similarity functions.

Every function returns a similarity in [0, 1], is symmetric in its arguments,
and returns exactly 1.0 on identical inputs. Empty-vs-empty comparisons are
vacuously similar (1.0), mirroring the count convention min(0,0)/max(0,0)=1.
"""

from __future__ import annotations

import math
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    BinMismatch,
    DegenerateRange,
    DimensionMismatch,
    EmptyPalette,
    NotNormalized,
    ZeroVector,
)
from .records import PaletteColor

HIST_TOL = 1e-6


def hellinger_similarity(h1: np.ndarray, h2: np.ndarray) -> float:
    """1 - Hellinger distance between normalized histograms.

    The distance is sqrt(1 - BC) with BC the Bhattacharyya coefficient
    sum(sqrt(h1*h2)). Multi-channel input (shape (C, B)) averages the
    per-channel distances before converting to a similarity.
    """
    h1 = np.asarray(h1, dtype=np.float64)
    h2 = np.asarray(h2, dtype=np.float64)
    if h1.shape != h2.shape:
        raise BinMismatch(f"histogram shapes {h1.shape} vs {h2.shape}")
    if h1.ndim == 1:
        h1 = h1[None, :]
        h2 = h2[None, :]
    sums = np.concatenate([h1.sum(axis=1), h2.sum(axis=1)])
    if np.any(np.abs(sums - 1.0) > HIST_TOL):
        raise NotNormalized(f"histogram channel sums {sums} not within {HIST_TOL} of 1")
    if np.array_equal(h1, h2):
        return 1.0
    bc = np.sqrt(h1 * h2).sum(axis=1)
    distances = np.sqrt(np.clip(1.0 - bc, 0.0, 1.0))
    return 1.0 - float(distances.mean())


# sRGB (D65, 2 degree observer) -> CIELAB, the standard reference conversion.

def _srgb_to_linear(c: float) -> float:
    c = c / 255.0
    if c > 0.04045:
        return ((c + 0.055) / 1.055) ** 2.4
    return c / 12.92


_XYZ_WHITE = (95.047, 100.0, 108.883)


def rgb_to_lab(rgb: Sequence[float]) -> tuple[float, float, float]:
    r = _srgb_to_linear(rgb[0]) * 100.0
    g = _srgb_to_linear(rgb[1]) * 100.0
    b = _srgb_to_linear(rgb[2]) * 100.0
    x = r * 0.4124 + g * 0.3576 + b * 0.1805
    y = r * 0.2126 + g * 0.7152 + b * 0.0722
    z = r * 0.0193 + g * 0.1192 + b * 0.9505

    def f(t: float) -> float:
        if t > 0.008856:
            return t ** (1.0 / 3.0)
        return 7.787 * t + 16.0 / 116.0

    fx, fy, fz = f(x / _XYZ_WHITE[0]), f(y / _XYZ_WHITE[1]), f(z / _XYZ_WHITE[2])
    return 116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)


def delta_e76(lab1: Sequence[float], lab2: Sequence[float]) -> float:
    return math.sqrt(sum((a - b) ** 2 for a, b in zip(lab1, lab2)))


def palette_mean_lab(palette: Sequence[PaletteColor]) -> tuple[float, float, float]:
    """Weight-average the palette down to a single RGB color, then convert."""
    if not palette:
        raise EmptyPalette("palette has no colors")
    total = sum(c.weight for c in palette)
    rgb = [
        sum(c.rgb[ch] * c.weight for c in palette) / total
        for ch in range(3)
    ]
    return rgb_to_lab(rgb)


def palette_similarity(p1: Sequence[PaletteColor], p2: Sequence[PaletteColor]) -> float:
    """1 - clamped CIE76 color difference between the palettes' mean colors."""
    de = delta_e76(palette_mean_lab(p1), palette_mean_lab(p2))
    return 1.0 - min(de / 100.0, 1.0)


def jaccard_similarity(a: Iterable[str], b: Iterable[str]) -> float:
    a, b = set(a), set(b)
    union = len(a | b)
    if union == 0:
        return 1.0
    return len(a & b) / union


def continuous_jaccard(c1: Mapping[str, float], c2: Mapping[str, float]) -> float:
    """sum(min)/sum(max) over per-class coverage fractions.

    Classes accumulate in sorted order so the result is bit-identical across
    processes regardless of hash randomization.
    """
    keys = sorted(set(c1) | set(c2))
    if not keys:
        return 1.0
    lo = sum(min(c1.get(k, 0.0), c2.get(k, 0.0)) for k in keys)
    hi = sum(max(c1.get(k, 0.0), c2.get(k, 0.0)) for k in keys)
    if hi == 0.0:
        return 1.0
    return lo / hi


def cosine_similarity_unit(v1: np.ndarray, v2: np.ndarray, signed: bool = False) -> float:
    """Cosine similarity mapped into [0, 1].

    Non-negative confidence vectors are already in [0, 1]; signed embedding
    vectors are remapped via (cos + 1) / 2.
    """
    v1 = np.asarray(v1, dtype=np.float64)
    v2 = np.asarray(v2, dtype=np.float64)
    if v1.shape != v2.shape:
        raise DimensionMismatch(f"vector shapes {v1.shape} vs {v2.shape}")
    n1 = float(np.linalg.norm(v1))
    n2 = float(np.linalg.norm(v2))
    if n1 == 0.0 or n2 == 0.0:
        raise ZeroVector("cosine similarity undefined on an all-zero vector")
    if np.array_equal(v1, v2):
        return 1.0
    cos = float(np.dot(v1, v2)) / (n1 * n2)
    cos = max(-1.0, min(1.0, cos))
    if signed:
        return (cos + 1.0) / 2.0
    return max(0.0, cos)


def scalar_similarity(x: float, y: float, lo: float, hi: float) -> float:
    """1 - |x - y| / (hi - lo), with both values clamped into [lo, hi]."""
    if not lo < hi:
        raise DegenerateRange(f"range ({lo}, {hi}) has min >= max")
    x = min(max(x, lo), hi)
    y = min(max(y, lo), hi)
    return 1.0 - abs(x - y) / (hi - lo)


def count_similarity(m: int, n: int) -> float:
    """Percentage of common instances: min/max, with 0 vs 0 counting as equal."""
    if m < 0 or n < 0:
        raise ValueError("counts must be non-negative")
    if m == n:
        return 1.0
    return min(m, n) / max(m, n)


def binary_similarity(a, b) -> float:
    return 1.0 if a == b else 0.0
