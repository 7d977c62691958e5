"""Plain-text PGM/PPM heatmaps for C-P and delta maps.

Images are M x M pixels; the first row is y = M so easy configs land at the
top right, as in the usual figure layout. Undefined cells are black.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError

SEQUENTIAL = "sequential_grayscale"
DIVERGING = "diverging"


@dataclass(frozen=True)
class ColorScale:
    kind: str
    value_min: float = 0.0
    value_max: float = 1.0
    center: float = 0.0
    span: float = 1.0

    def __post_init__(self):
        if self.kind == SEQUENTIAL:
            if not self.value_min < self.value_max:
                raise InputError(f"degenerate scale [{self.value_min}, {self.value_max}]")
        elif self.kind == DIVERGING:
            if not self.span > 0:
                raise InputError(f"diverging span must be positive, got {self.span}")
        else:
            raise InputError(f"unknown color scale kind {self.kind!r}")

    @classmethod
    def sequential(cls, value_min: float, value_max: float) -> "ColorScale":
        return cls(SEQUENTIAL, value_min=value_min, value_max=value_max)

    @classmethod
    def diverging(cls, span: float, center: float = 0.0) -> "ColorScale":
        return cls(DIVERGING, center=center, span=span)


def default_sequential(grid: np.ndarray) -> ColorScale:
    """Min/max over defined cells, widened to 1.0 when they coincide."""
    values = grid[~np.isnan(grid)]
    if values.size == 0:
        return ColorScale.sequential(0.0, 1.0)
    lo, hi = float(values.min()), float(values.max())
    return ColorScale.sequential(lo, hi if hi > lo else lo + 1.0)


def default_diverging(grid: np.ndarray) -> ColorScale:
    values = np.abs(grid[~np.isnan(grid)])
    span = float(values.max()) if values.size else 0.0
    return ColorScale.diverging(span if span > 0 else 1.0)


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def _clamp(x: float, lo: float, hi: float) -> float:
    return lo if x < lo else hi if x > hi else x


def _rows(grid: np.ndarray):
    m = grid.shape[0]
    for j in range(m, 0, -1):
        yield grid[j - 1].tolist()


def render_sequential(cp, scale: ColorScale) -> str:
    """Grayscale P2 image; low values are bright."""
    if scale.kind != SEQUENTIAL:
        raise InputError("render_sequential needs a sequential scale")
    grid = cp.grid
    m = grid.shape[0]
    width = scale.value_max - scale.value_min
    out = [f"P2\n{m} {m}\n255\n"]
    for row in _rows(grid):
        pixels = []
        for v in row:
            if math.isnan(v):
                pixels.append(0)
            else:
                c = _clamp((v - scale.value_min) / width, 0.0, 1.0)
                pixels.append(_round_half_up(255 * (1 - c)))
        out.append(" ".join(map(str, pixels)) + "\n")
    return "".join(out)


def render_diverging(delta, scale: ColorScale) -> str:
    """Color P3 image: white at the center, red for gains, blue for losses."""
    if scale.kind != DIVERGING:
        raise InputError("render_diverging needs a diverging scale")
    grid = delta.grid
    m = grid.shape[0]
    out = [f"P3\n{m} {m}\n255\n"]
    for row in _rows(grid):
        pixels = []
        for v in row:
            if math.isnan(v):
                pixels.append("0 0 0")
                continue
            t = _clamp((v - scale.center) / scale.span, -1.0, 1.0)
            fade = 255 - _round_half_up(255 * abs(t))
            pixels.append(f"255 {fade} {fade}" if t >= 0 else f"{fade} {fade} 255")
        out.append(" ".join(pixels) + "\n")
    return "".join(out)
