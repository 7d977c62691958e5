"""Config-performance (C-P) maps.

Cell ``(x, y)`` of an ``M x M`` map evaluates the target system on the
``ceil(x/M * P)`` hardest positives and ``ceil(y/M * Q)`` hardest negatives
of a fixed :class:`HardnessOrder`. Cell ``(M, M)`` is the whole trial set.
Grids are stored row-major by y: ``grid[y - 1, x - 1]``, NaN = undefined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EvaluationError, InputError, ParseError
from .hardness import HardnessOrder
from .metrics import DcfParams, eer_sorted, min_dcf_sorted
from .score_io import ScoredTrials
from .trial_model import TrialKey

METRIC_KINDS = ("eer", "min_dcf")
MAX_RESOLUTION = 500


@dataclass(frozen=True)
class GridSpec:
    resolution: int = 20
    min_trials_per_class: int = 50

    def __post_init__(self):
        if not (2 <= self.resolution <= MAX_RESOLUTION):
            raise InputError(f"grid resolution must be in [2, {MAX_RESOLUTION}], got {self.resolution}")
        if self.min_trials_per_class < 1:
            raise InputError(f"min_trials_per_class must be >= 1, got {self.min_trials_per_class}")


@dataclass(frozen=True)
class TrialConfig:
    x_index: int
    y_index: int
    num_positives: int
    num_negatives: int
    positive_keys: tuple[TrialKey, ...] = field(repr=False, default=())
    negative_keys: tuple[TrialKey, ...] = field(repr=False, default=())


@dataclass(frozen=True, eq=False)
class CPMap:
    grid: np.ndarray
    metric_kind: str | None = None
    grid_spec: GridSpec | None = None
    system_name: str = ""
    ordering: str | None = None

    @property
    def resolution(self) -> int:
        return self.grid.shape[0]

    def cell(self, x_index: int, y_index: int) -> float:
        """Value at (x, y), NaN when undefined."""
        return float(self.grid[y_index - 1, x_index - 1])

    @property
    def defined(self) -> np.ndarray:
        return ~np.isnan(self.grid)


def prefix_size(index: int, resolution: int, total: int) -> int:
    """ceil(index / resolution * total) in exact integer arithmetic."""
    return -(-index * total // resolution)


def _check_index(i: int, m: int, axis: str) -> None:
    if not (1 <= i <= m):
        raise InputError(f"{axis}_index {i} outside [1, {m}]")


def config_at(order: HardnessOrder, spec: GridSpec, x_index: int, y_index: int) -> TrialConfig:
    m = spec.resolution
    _check_index(x_index, m, "x")
    _check_index(y_index, m, "y")
    a = prefix_size(x_index, m, order.num_positives)
    b = prefix_size(y_index, m, order.num_negatives)
    return TrialConfig(x_index, y_index, a, b, order.positive_order[:a], order.negative_order[:b])


def _ordered_scores(keys, scores: np.ndarray, order_keys, cls: str) -> np.ndarray:
    if tuple(keys) == tuple(order_keys):
        return np.asarray(scores)
    index = {k: i for i, k in enumerate(keys)}
    if len(order_keys) != len(index) or set(order_keys) != index.keys():
        missing = next((k for k in order_keys if k not in index), None)
        if missing is not None:
            raise InputError(f"ordering has {cls} trial {' '.join(missing)} unknown to the scores")
        raise InputError(f"ordering does not cover the {cls} trials of the scores")
    return scores[[index[k] for k in order_keys]]


def _sorted_prefixes(values: np.ndarray, sizes: list[int]):
    """Yield ascending-sorted copies of ``values[:s]`` for increasing sizes."""
    current = np.empty(0)
    done = 0
    for s in sizes:
        if s > done:
            chunk = np.sort(values[done:s])
            # two sorted runs: the stable sort (timsort) merges them in linear time
            current = np.sort(np.concatenate((current, chunk)), kind="stable")
            done = s
        yield current


def compute_cp_map(
    scored: ScoredTrials,
    order: HardnessOrder,
    spec: GridSpec | None = None,
    metric_kind: str = "eer",
    dcf_params: DcfParams | None = None,
) -> CPMap:
    """Evaluate the metric on every trial config of the grid."""
    spec = spec or GridSpec()
    if metric_kind not in METRIC_KINDS:
        raise InputError(f"unknown metric {metric_kind!r}; expected one of {METRIC_KINDS}")
    if (metric_kind == "min_dcf") != (dcf_params is not None):
        raise InputError("dcf_params must be given exactly when metric_kind is 'min_dcf'")
    pos = _ordered_scores(scored.pos_keys, scored.pos_scores, order.positive_order, "positive")
    neg = _ordered_scores(scored.neg_keys, scored.neg_scores, order.negative_order, "negative")
    if not len(pos) or not len(neg):
        raise EvaluationError("C-P map needs both positive and negative trials")

    m = spec.resolution
    pos_sizes = [prefix_size(i, m, len(pos)) for i in range(1, m + 1)]
    neg_sizes = [prefix_size(j, m, len(neg)) for j in range(1, m + 1)]
    if metric_kind == "eer":
        def metric(p, n):
            return eer_sorted(p, n).eer
    else:
        def metric(p, n):
            return min_dcf_sorted(p, n, dcf_params).min_dcf

    # keep every prefix of the smaller class, stream the larger one
    swap = len(neg) < len(pos)
    inner_vals, inner_sizes, outer_vals, outer_sizes = (
        (neg, neg_sizes, pos, pos_sizes) if swap else (pos, pos_sizes, neg, neg_sizes)
    )
    min_n = spec.min_trials_per_class
    inner = [p if s >= min_n else None for p, s in zip(_sorted_prefixes(inner_vals, inner_sizes), inner_sizes)]
    grid = np.full((m, m), np.nan)
    for o, (outer, o_size) in enumerate(zip(_sorted_prefixes(outer_vals, outer_sizes), outer_sizes)):
        if o_size < min_n:
            continue
        for i, prefix in enumerate(inner):
            if prefix is None:
                continue
            if swap:
                grid[i, o] = metric(outer, prefix)
            else:
                grid[o, i] = metric(prefix, outer)
    grid.flags.writeable = False
    return CPMap(grid, metric_kind, spec, scored.name, order.description)


# --- CSV -------------------------------------------------------------------


def _fmt(v: float) -> str:
    return "NA" if math.isnan(v) else f"{v:.6f}"


def grid_to_csv(grid: np.ndarray) -> str:
    """Header ``x_frac,<x/M>...`` then rows y = M..1 as ``<y/M>,<cells>``."""
    m = grid.shape[0]
    lines = ["x_frac," + ",".join(f"{x / m:.6f}" for x in range(1, m + 1))]
    for j in range(m, 0, -1):
        lines.append(f"{j / m:.6f}," + ",".join(_fmt(v) for v in grid[j - 1].tolist()))
    return "\n".join(lines) + "\n"


def csv_to_grid(text: str, source: str | None = None) -> np.ndarray:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or not lines[0].startswith("x_frac,"):
        raise ParseError("missing 'x_frac,' header", 1, source)
    m = len(lines[0].split(",")) - 1
    if m < 1 or len(lines) != m + 1:
        raise ParseError(f"expected {m} data rows, found {len(lines) - 1}", None, source)
    grid = np.full((m, m), np.nan)
    for r, line in enumerate(lines[1:], 2):
        cells = line.split(",")
        if len(cells) != m + 1:
            raise ParseError(f"expected {m + 1} fields, found {len(cells)}", r, source)
        j = m - (r - 2)
        try:
            grid[j - 1] = [math.nan if c.strip() == "NA" else float(c) for c in cells[1:]]
        except ValueError:
            raise ParseError("unparseable cell value", r, source) from None
    return grid


def export_cp_map(cp: CPMap) -> str:
    return grid_to_csv(cp.grid)


def parse_cp_map(text: str, source: str | None = None, name: str = "") -> CPMap:
    """Read an exported map; metric kind and ordering are not recorded in CSV."""
    grid = csv_to_grid(text, source)
    grid.flags.writeable = False
    return CPMap(grid, None, None, name, None)
