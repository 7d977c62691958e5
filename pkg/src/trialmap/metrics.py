"""EER, minimum DCF and DET operating points.

Decision rule: a trial is accepted when ``score >= theta``. With the pooled
distinct scores ``t_1 < ... < t_k`` the achievable operating points are
``theta = -inf`` (accept all) and one point per region ``(t_i, t_{i+1}]``,
the last being reject-all. The ``*_sorted`` helpers take already sorted
class arrays so that C-P map cells can reuse them on prefix slices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EvaluationError, InputError
from .score_io import ScoredTrials


@dataclass(frozen=True)
class EerResult:
    eer: float
    threshold: float


@dataclass(frozen=True)
class DcfParams:
    p_target: float = 0.01
    c_miss: float = 1.0
    c_fa: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.p_target < 1.0):
            raise InputError(f"p_target must lie in (0, 1), got {self.p_target}")
        if not (self.c_miss > 0 and self.c_fa > 0):
            raise InputError("c_miss and c_fa must be positive")

    @property
    def miss_weight(self) -> float:
        return self.c_miss * self.p_target

    @property
    def fa_weight(self) -> float:
        return self.c_fa * (1.0 - self.p_target)

    @property
    def normalizer(self) -> float:
        return min(self.miss_weight, self.fa_weight)


@dataclass(frozen=True)
class DcfResult:
    min_dcf: float
    threshold: float


def _sorted_classes(scored: ScoredTrials) -> tuple[np.ndarray, np.ndarray]:
    scored.require_both_classes()
    return np.sort(scored.pos_scores), np.sort(scored.neg_scores)


def error_rates_at(scored: ScoredTrials, theta: float) -> tuple[float, float]:
    """(FRR, FAR) at threshold ``theta``."""
    scored.require_both_classes()
    frr = np.count_nonzero(scored.pos_scores < theta) / len(scored.pos_scores)
    far = np.count_nonzero(scored.neg_scores >= theta) / len(scored.neg_scores)
    return frr, far


def _counts_after(pos: np.ndarray, neg: np.ndarray, t: float) -> tuple[int, int]:
    """(#positives rejected, #negatives accepted) for theta just above t."""
    return int(np.searchsorted(pos, t, "right")), len(neg) - int(np.searchsorted(neg, t, "right"))


def _first_crossing(values: np.ndarray, pos: np.ndarray, neg: np.ndarray) -> float:
    """Smallest v in sorted ``values`` with FRR >= FAR just above v, or +inf."""
    n_pos, n_neg = len(pos), len(neg)
    lo, hi = 0, len(values)
    while lo < hi:
        mid = (lo + hi) // 2
        fr, fa = _counts_after(pos, neg, values[mid])
        if fr * n_neg >= fa * n_pos:
            hi = mid
        else:
            lo = mid + 1
    return float(values[lo]) if lo < len(values) else math.inf


def _prev_score(pos: np.ndarray, neg: np.ndarray, t: float) -> float:
    best = -math.inf
    for arr in (pos, neg):
        i = int(np.searchsorted(arr, t, "left"))
        if i:
            best = max(best, float(arr[i - 1]))
    return best


def _next_score(pos: np.ndarray, neg: np.ndarray, t: float) -> float:
    best = math.inf
    for arr in (pos, neg):
        i = int(np.searchsorted(arr, t, "right"))
        if i < len(arr):
            best = min(best, float(arr[i]))
    return best


def eer_sorted(pos: np.ndarray, neg: np.ndarray) -> EerResult:
    """Interpolated EER from ascending-sorted, non-empty class score arrays.

    FRR - FAR is non-decreasing along the operating points, so the first
    point with FRR >= FAR is found by binary search over each class. If it
    is an exact tie that point is the answer and the threshold is the middle
    of its score region; otherwise the crossing is interpolated linearly on
    the ROC segment from the previous point and the threshold is the score
    at which the step happens.
    """
    n_pos, n_neg = len(pos), len(neg)
    t_star = min(_first_crossing(pos, pos, neg), _first_crossing(neg, pos, neg))
    fr1, fa1 = _counts_after(pos, neg, t_star)
    if fr1 * n_neg == fa1 * n_pos:
        return EerResult(fr1 / n_pos, 0.5 * (t_star + _next_score(pos, neg, t_star)))
    prev = _prev_score(pos, neg, t_star)
    fr0, fa0 = (0, n_neg) if prev == -math.inf else _counts_after(pos, neg, prev)
    frr0, far0 = fr0 / n_pos, fa0 / n_neg
    frr1, far1 = fr1 / n_pos, fa1 / n_neg
    d0, d1 = frr0 - far0, frr1 - far1
    alpha = d0 / (d0 - d1)
    return EerResult(frr0 + alpha * (frr1 - frr0), t_star)


def compute_eer(scored: ScoredTrials) -> EerResult:
    return eer_sorted(*_sorted_classes(scored))


def _operating_points(pos: np.ndarray, neg: np.ndarray):
    """Pooled distinct scores plus FRR/FAR at every operating point (len k+1)."""
    # two sorted runs: the stable sort merges them in linear time
    pooled = np.sort(np.concatenate((pos, neg)), kind="stable")
    pooled = pooled[np.r_[True, pooled[1:] != pooled[:-1]]]
    fr = np.empty(len(pooled) + 1, dtype=np.int64)
    fa = np.empty(len(pooled) + 1, dtype=np.int64)
    fr[0], fa[0] = 0, len(neg)
    fr[1:] = np.searchsorted(pos, pooled, "right")
    fa[1:] = len(neg) - np.searchsorted(neg, pooled, "right")
    return pooled, fr / len(pos), fa / len(neg)


def min_dcf_sorted(pos: np.ndarray, neg: np.ndarray, params: DcfParams) -> DcfResult:
    pooled, frr, far = _operating_points(pos, neg)
    dcf = (params.miss_weight * frr + params.fa_weight * far) / params.normalizer
    i = int(np.argmin(dcf))
    if i == 0:
        threshold = -math.inf
    elif i == len(pooled):
        threshold = math.inf
    else:
        threshold = 0.5 * (float(pooled[i - 1]) + float(pooled[i]))
    return DcfResult(float(dcf[i]), threshold)


def compute_min_dcf(scored: ScoredTrials, params: DcfParams | None = None) -> DcfResult:
    """Minimum normalized DCF over all operating points.

    Normalized by ``min(c_miss * p_target, c_fa * (1 - p_target))``, the cost
    of the better trivial system, so reject-all scores at most 1.
    """
    return min_dcf_sorted(*_sorted_classes(scored), params or DcfParams())


def det_points(scored: ScoredTrials) -> list[tuple[float, float]]:
    """All (FAR, FRR) operating points in increasing-threshold order."""
    _, frr, far = _operating_points(*_sorted_classes(scored))
    points = []
    for p in zip(far.tolist(), frr.tolist()):
        if not points or points[-1] != p:
            points.append(p)
    return points


def dcf_at(scored: ScoredTrials, theta: float, params: DcfParams) -> float:
    """Normalized DCF at a single threshold."""
    frr, far = error_rates_at(scored, theta)
    return (params.miss_weight * frr + params.fa_weight * far) / params.normalizer


__all__ = [
    "DcfParams",
    "DcfResult",
    "EerResult",
    "EvaluationError",
    "compute_eer",
    "compute_min_dcf",
    "dcf_at",
    "det_points",
    "eer_sorted",
    "error_rates_at",
    "min_dcf_sorted",
]
