"""Delta C-P maps: cell-wise relative change ratio between two systems."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cpmap import CPMap, grid_to_csv
from .errors import EvaluationError, InputError

DEFAULT_EPSILON = 1e-5


@dataclass(frozen=True, eq=False)
class DeltaMap:
    """RCR per cell, NaN where undefined.

    ``zero_ref_cells`` counts cells dropped only because the reference value
    was exactly 0 (the ratio has no denominator there).
    """

    grid: np.ndarray
    ref_name: str = "ref"
    test_name: str = "test"
    epsilon: float = DEFAULT_EPSILON
    zero_ref_cells: int = 0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise InputError(f"epsilon must be positive, got {self.epsilon}")

    @property
    def resolution(self) -> int:
        return self.grid.shape[0]

    def cell(self, x_index: int, y_index: int) -> float:
        return float(self.grid[y_index - 1, x_index - 1])


@dataclass(frozen=True)
class WtlSummary:
    win: float
    tie: float
    lose: float
    defined_cells: int

    def line(self) -> str:
        return f"win={self.win:.6f} tie={self.tie:.6f} lose={self.lose:.6f} defined={self.defined_cells}"


def _check_compatible(ref: CPMap, test: CPMap) -> None:
    if ref.grid.shape != test.grid.shape:
        raise InputError(f"grid shapes differ: {ref.grid.shape} vs {test.grid.shape}")
    # CSV-loaded maps carry no metadata; compare only what both sides know
    if ref.metric_kind and test.metric_kind and ref.metric_kind != test.metric_kind:
        raise InputError(f"metric kinds differ: {ref.metric_kind} vs {test.metric_kind}")
    if ref.grid_spec and test.grid_spec and ref.grid_spec != test.grid_spec:
        raise InputError(f"grid specs differ: {ref.grid_spec} vs {test.grid_spec}")
    if ref.ordering and test.ordering and ref.ordering != test.ordering:
        raise InputError(f"maps use different orderings: {ref.ordering!r} vs {test.ordering!r}")


def compute_delta_map(ref: CPMap, test: CPMap, epsilon: float = DEFAULT_EPSILON) -> DeltaMap:
    """RCR = (ref - test) / ref; positive means the test system is better."""
    _check_compatible(ref, test)
    r, t = ref.grid, test.grid
    both = ~np.isnan(r) & ~np.isnan(t)
    zero = both & (r == 0)
    ok = both & ~zero
    grid = np.full(r.shape, np.nan)
    grid[ok] = (r[ok] - t[ok]) / r[ok]
    grid.flags.writeable = False
    return DeltaMap(grid, ref.system_name or "ref", test.system_name or "test", epsilon, int(zero.sum()))


def summarize_wtl(delta: DeltaMap) -> WtlSummary:
    """Fractions of defined cells with RCR >= eps, |RCR| < eps, RCR <= -eps."""
    values = delta.grid[~np.isnan(delta.grid)]
    n = values.size
    if n == 0:
        raise EvaluationError("delta map has no defined cells")
    eps = delta.epsilon
    wins = int(np.count_nonzero(values >= eps))
    losses = int(np.count_nonzero(values <= -eps))
    ties = n - wins - losses
    return WtlSummary(wins / n, ties / n, losses / n, n)


def export_delta_map(delta: DeltaMap) -> str:
    return grid_to_csv(delta.grid)
