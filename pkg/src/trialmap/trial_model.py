"""Trials, trial sets and deterministic cross-pairing generators."""

from __future__ import annotations

from collections import Counter
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import InputError

TARGET = "target"
NONTARGET = "nontarget"
LABELS = (TARGET, NONTARGET)

TrialKey = tuple[str, str]


class Utterance(NamedTuple):
    speaker_id: str
    utt_id: str


class Trial(NamedTuple):
    enroll_id: str
    test_id: str
    label: str

    @property
    def key(self) -> TrialKey:
        return (self.enroll_id, self.test_id)

    @property
    def is_target(self) -> bool:
        return self.label == TARGET


# odd 64-bit multipliers, one per 8-byte word of an id
_WORD_MULTIPLIERS = np.random.default_rng(0x5EED).integers(1, 2**63, 64, dtype=np.uint64) | np.uint64(1)


def _row_hashes(column: np.ndarray) -> np.ndarray:
    """64-bit hash per entry of a fixed-width bytes array (wrapping arithmetic).

    Only used to find candidate duplicates; equal hashes are re-checked exactly.
    """
    column = np.ascontiguousarray(column)
    n, width = len(column), column.dtype.itemsize
    raw = column.view(np.uint8).reshape(n, width)
    if width % 8:
        raw = np.concatenate((raw, np.zeros((n, 8 - width % 8), np.uint8)), axis=1)
    words = raw.view(np.uint64)
    if words.shape[1] > len(_WORD_MULTIPLIERS):
        mult = np.resize(_WORD_MULTIPLIERS, words.shape[1])
    else:
        mult = _WORD_MULTIPLIERS[: words.shape[1]]
    return (words * mult).sum(axis=1, dtype=np.uint64)


def _has_duplicate_pair(first, second) -> bool:
    # sorting 64-bit hashes is cheaper than a set of tuples; equal hashes get an exact check
    if isinstance(first, np.ndarray):
        hashes = _row_hashes(first) * np.uint64(0x9E3779B97F4A7C15) + _row_hashes(second)
        pairs = lambda: zip(first.tolist(), second.tolist())
    else:
        hashes = np.fromiter(map(hash, zip(first, second)), dtype=np.int64, count=len(first))
        pairs = lambda: zip(first, second)
    hashes.sort()
    if not (hashes[1:] == hashes[:-1]).any():
        return False
    return len(set(pairs())) != len(first)


def _decode(column: np.ndarray) -> list[str]:
    return column.astype(str).tolist()


class TrialSet:
    """Ordered, duplicate-free collection of labelled trials.

    Stored column-wise so million-trial lists stay cheap; iterating yields
    :class:`Trial` tuples.
    """

    __slots__ = ("_enroll", "_test", "_key_bytes", "is_target", "counts", "_trials")

    def __init__(self, trials: Iterable[Trial] = ()):
        trials = tuple(trials)
        for t in trials:
            if t.label not in LABELS:
                raise InputError(f"unknown label {t.label!r} for trial {t.enroll_id} {t.test_id}")
        self._init(
            [t.enroll_id for t in trials],
            [t.test_id for t in trials],
            np.fromiter((t.label == TARGET for t in trials), dtype=bool, count=len(trials)),
        )
        self._trials = trials

    @classmethod
    def from_columns(cls, enroll_ids: Sequence[str], test_ids: Sequence[str], is_target) -> "TrialSet":
        self = cls.__new__(cls)
        self._init(
            enroll_ids if type(enroll_ids) is list else list(enroll_ids),
            test_ids if type(test_ids) is list else list(test_ids),
            np.asarray(is_target, dtype=bool),
        )
        self._trials = None
        return self

    @classmethod
    def _from_key_bytes(cls, enroll: np.ndarray, test: np.ndarray, is_target: np.ndarray) -> "TrialSet":
        """Build from ASCII fixed-width bytes columns; id strings are decoded on demand."""
        self = cls.__new__(cls)
        self._init(enroll, test, np.asarray(is_target, dtype=bool))
        self._trials = None
        return self

    def _init(self, enroll_ids, test_ids, is_target):
        if not (len(enroll_ids) == len(test_ids) == len(is_target)):
            raise InputError("trial columns differ in length")
        if _has_duplicate_pair(enroll_ids, test_ids):
            if isinstance(enroll_ids, np.ndarray):
                enroll_ids, test_ids = _decode(enroll_ids), _decode(test_ids)
            dup = next(k for k, c in Counter(zip(enroll_ids, test_ids)).items() if c > 1)
            raise InputError(f"duplicate trial {dup[0]} {dup[1]}")
        is_target = is_target.copy()
        is_target.flags.writeable = False
        if isinstance(enroll_ids, np.ndarray):
            self._key_bytes = (enroll_ids, test_ids)
            self._enroll = self._test = None
        else:
            self._key_bytes = None
            self._enroll, self._test = enroll_ids, test_ids
        self.is_target = is_target
        n_target = int(is_target.sum())
        self.counts = (n_target, len(is_target) - n_target)

    def _decode_ids(self) -> None:
        enroll, test = self._key_bytes
        self._enroll, self._test = _decode(enroll), _decode(test)

    @property
    def enroll_ids(self) -> list[str]:
        if self._enroll is None:
            self._decode_ids()
        return self._enroll

    @property
    def test_ids(self) -> list[str]:
        if self._test is None:
            self._decode_ids()
        return self._test

    @property
    def trials(self) -> tuple[Trial, ...]:
        if self._trials is None:
            labels = [TARGET if x else NONTARGET for x in self.is_target.tolist()]
            self._trials = tuple(map(Trial, self.enroll_ids, self.test_ids, labels))
        return self._trials

    def keys(self) -> list[TrialKey]:
        return list(zip(self.enroll_ids, self.test_ids))

    def __len__(self) -> int:
        return len(self.is_target)

    def __iter__(self):
        return iter(self.trials)

    def __eq__(self, other):
        if not isinstance(other, TrialSet):
            return NotImplemented
        return (
            self.enroll_ids == other.enroll_ids
            and self.test_ids == other.test_ids
            and np.array_equal(self.is_target, other.is_target)
        )

    def __repr__(self) -> str:
        return f"TrialSet(target={self.counts[0]}, nontarget={self.counts[1]})"

    @property
    def num_target(self) -> int:
        return self.counts[0]

    @property
    def num_nontarget(self) -> int:
        return self.counts[1]


def _check_utts(utts: Sequence[Utterance], what: str) -> None:
    for u in utts:
        if not u.speaker_id or not u.utt_id:
            raise InputError(f"{what}: empty speaker_id or utt_id in {u!r}")
    dup = [k for k, c in Counter(u.utt_id for u in utts).items() if c > 1]
    if dup:
        raise InputError(f"{what}: duplicate utt_id {sorted(dup)[0]!r}")


def generate_full_cross_pairing(utts: Sequence[Utterance]) -> TrialSet:
    """Pair every utterance with every other one (ordered pairs, no self-pairs).

    For N speakers with K utterances each this yields NK(K-1) target and
    N(N-1)K^2 non-target trials. Output is sorted by (enroll_id, test_id).
    """
    utts = list(utts)
    _check_utts(utts, "full cross-pairing")
    if len(utts) < 2:
        raise InputError("full cross-pairing needs at least 2 utterances")
    ordered = sorted(utts, key=lambda u: u.utt_id)
    trials = [
        Trial(e.utt_id, t.utt_id, TARGET if e.speaker_id == t.speaker_id else NONTARGET)
        for e in ordered
        for t in ordered
        if e.utt_id != t.utt_id
    ]
    return TrialSet(trials)


def generate_enrollment_fixed(enrollments: Sequence[Utterance], tests: Sequence[Utterance]) -> TrialSet:
    """Pair each per-speaker enrollment with every test utterance."""
    enrollments, tests = list(enrollments), list(tests)
    _check_utts(enrollments, "enrollments")
    _check_utts(tests, "tests")
    spk = Counter(u.speaker_id for u in enrollments)
    shared = [s for s, c in spk.items() if c > 1]
    if shared:
        raise InputError(f"speaker {sorted(shared)[0]!r} has more than one enrollment")
    clash = {u.utt_id for u in enrollments} & {u.utt_id for u in tests}
    if clash:
        raise InputError(f"utt_id {sorted(clash)[0]!r} appears in both enrollment and test sets")
    trials = [
        Trial(e.utt_id, t.utt_id, TARGET if e.speaker_id == t.speaker_id else NONTARGET)
        for e in sorted(enrollments, key=lambda u: u.utt_id)
        for t in sorted(tests, key=lambda u: u.utt_id)
    ]
    return TrialSet(trials)
