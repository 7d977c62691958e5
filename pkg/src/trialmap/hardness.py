"""Hardness orderings of positive and negative trials.

A positive trial is hard when it scores low, a negative one when it scores
high. Orderings can be fused across several reference systems, either by
averaging per-system rank-normalized scores (robust to differing score
scales) or by averaging raw scores.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import InputError, ParseError
from .score_io import ScoredTrials
from .trial_model import TrialKey

FUSION_METHODS = ("rank_mean", "raw_mean")
POSITIVE_FILE = "positive_order.txt"
NEGATIVE_FILE = "negative_order.txt"


@dataclass(frozen=True)
class HardnessOrder:
    positive_order: tuple[TrialKey, ...]
    negative_order: tuple[TrialKey, ...]
    description: str = ""

    @property
    def num_positives(self) -> int:
        return len(self.positive_order)

    @property
    def num_negatives(self) -> int:
        return len(self.negative_order)


def rank_normalize(scores: Sequence[float]) -> np.ndarray:
    """Map scores to ``(rank - 1) / (n - 1)`` with tie-averaged ranks."""
    scores = np.asarray(scores, dtype=np.float64)
    if scores.size == 0:
        raise InputError("cannot rank-normalize an empty sequence")
    if scores.size == 1:
        return np.array([0.5])
    from scipy.stats import rankdata  # deferred: scipy.stats costs ~0.5 s to import

    return (rankdata(scores, method="average") - 1.0) / (scores.size - 1)


def _aligned(reference: tuple[TrialKey, ...], system: ScoredTrials, keys, scores, cls: str) -> np.ndarray:
    """Scores of ``system`` rearranged to follow ``reference`` key order."""
    if keys == reference:
        return scores
    ref_set, sys_set = set(reference), set(keys)
    if ref_set != sys_set or len(keys) != len(reference):
        only_ref = sorted(ref_set - sys_set)
        only_sys = sorted(sys_set - ref_set)
        if only_ref:
            raise InputError(f"system {system.name!r} lacks {cls} trial {' '.join(only_ref[0])}")
        if only_sys:
            raise InputError(f"system {system.name!r} has extra {cls} trial {' '.join(only_sys[0])}")
        raise InputError(f"system {system.name!r} repeats {cls} trial keys")
    index = {k: i for i, k in enumerate(keys)}
    return scores[[index[k] for k in reference]]


def _sort_with_key_ties(values: np.ndarray, keys: tuple[TrialKey, ...]) -> list[int]:
    """Indices sorting ``values`` ascending; equal values ordered by key."""
    order = np.argsort(values, kind="stable")
    ordered = values[order]
    tied = np.flatnonzero(ordered[1:] == ordered[:-1])
    if tied.size == 0:
        return order.tolist()
    order = order.tolist()
    # walk maximal runs of equal values
    starts = tied[np.r_[True, np.diff(tied) > 1]]
    ends = tied[np.r_[np.diff(tied) > 1, True]] + 2
    for s, e in zip(starts.tolist(), ends.tolist()):
        order[s:e] = sorted(order[s:e], key=keys.__getitem__)
    return order


def fuse_orderings(systems: Sequence[ScoredTrials], method: str = "rank_mean") -> HardnessOrder:
    """Hardest-first orderings from the mean (normalized) score of ``systems``."""
    if method not in FUSION_METHODS:
        raise InputError(f"unknown fusion method {method!r}; expected one of {FUSION_METHODS}")
    systems = list(systems)
    if not systems:
        raise InputError("need at least one system to build an ordering")
    ref = systems[0]
    fused = {}
    for cls, keys_attr, scores_attr in (("positive", "pos_keys", "pos_scores"), ("negative", "neg_keys", "neg_scores")):
        reference = getattr(ref, keys_attr)
        total = np.zeros(len(reference))
        for system in systems:
            scores = _aligned(reference, system, getattr(system, keys_attr), getattr(system, scores_attr), cls)
            if method == "rank_mean" and len(scores):
                scores = rank_normalize(scores)
            total = total + scores
        fused[cls] = total / len(systems)
    pos_keys, neg_keys = ref.pos_keys, ref.neg_keys
    pos_idx = _sort_with_key_ties(fused["positive"], pos_keys)
    neg_idx = _sort_with_key_ties(-fused["negative"], neg_keys)
    names = ",".join(s.name or f"system{i}" for i, s in enumerate(systems))
    return HardnessOrder(
        tuple(pos_keys[i] for i in pos_idx),
        tuple(neg_keys[i] for i in neg_idx),
        f"{method}({names})",
    )


def self_order(scored: ScoredTrials) -> HardnessOrder:
    """Order by the system's own scores."""
    order = fuse_orderings([scored], "rank_mean")
    return HardnessOrder(order.positive_order, order.negative_order, f"self({scored.name or 'system'})")


def _format_keys(keys) -> str:
    return "".join(f"{e} {t}\n" for e, t in keys)


def write_order(order: HardnessOrder, directory: str | Path) -> tuple[Path, Path]:
    """Write ``positive_order.txt`` and ``negative_order.txt`` (hardest first)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    pos_path, neg_path = directory / POSITIVE_FILE, directory / NEGATIVE_FILE
    pos_path.write_text(_format_keys(order.positive_order), encoding="utf-8")
    neg_path.write_text(_format_keys(order.negative_order), encoding="utf-8")
    return pos_path, neg_path


def parse_order_keys(text: str, source: str | None = None) -> tuple[TrialKey, ...]:
    keys = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line[0] == "#":
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected 2 fields, found {len(parts)}", lineno, source)
        key = (parts[0], parts[1])
        if key in seen:
            raise ParseError(f"duplicate key {parts[0]} {parts[1]}", lineno, source)
        seen.add(key)
        keys.append(key)
    return tuple(keys)


def read_order(directory: str | Path) -> HardnessOrder:
    directory = Path(directory)
    parts = []
    for name in (POSITIVE_FILE, NEGATIVE_FILE):
        path = directory / name
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot read order file {path}: {exc.strerror}") from None
        parts.append(parse_order_keys(text, str(path)))
    return HardnessOrder(parts[0], parts[1], f"file({directory})")
