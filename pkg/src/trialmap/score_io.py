"""Reading and writing trial keys and score files, and joining them.

Both files are whitespace-delimited, three columns per line. Blank lines and
lines starting with ``#`` are skipped; CRLF endings are accepted.

    trials:  <enroll_id> <test_id> target|nontarget
    scores:  <enroll_id> <test_id> <score>

Plain-ASCII comment-free files take a vectorised path; anything else, and
every error, goes through the line-by-line parser so that messages carry the
offending line number.
"""

from __future__ import annotations

import io
import math
import os
from functools import cached_property
from itertools import compress
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import EvaluationError, InputError, ParseError
from .trial_model import LABELS, NONTARGET, TARGET, TrialKey, TrialSet


class ScoreTable:
    """Mapping (enroll_id, test_id) -> finite score, keeping file order."""

    __slots__ = ("enroll_ids", "test_ids", "values", "__dict__")

    def __init__(self, entries: dict[TrialKey, float] | None = None):
        entries = dict(entries or {})
        values = np.fromiter(entries.values(), dtype=np.float64, count=len(entries))
        if not np.isfinite(values).all():
            raise InputError("scores must be finite")
        self._set([e for e, _ in entries], [t for _, t in entries], values)
        self.__dict__["entries"] = entries

    @classmethod
    def _from_columns(cls, enroll_ids: list[str], test_ids: list[str], values: np.ndarray) -> "ScoreTable":
        # caller guarantees unique keys and finite values
        self = cls.__new__(cls)
        self._set(enroll_ids, test_ids, values)
        return self

    def _set(self, enroll_ids, test_ids, values):
        values.flags.writeable = False
        self.enroll_ids = enroll_ids
        self.test_ids = test_ids
        self.values = values

    @cached_property
    def entries(self) -> dict[TrialKey, float]:
        return dict(zip(zip(self.enroll_ids, self.test_ids), self.values.tolist()))

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, key: TrialKey) -> float:
        return self.entries[key]

    def __contains__(self, key) -> bool:
        return key in self.entries

    def __eq__(self, other):
        if not isinstance(other, ScoreTable):
            return NotImplemented
        return self.entries == other.entries

    def __repr__(self) -> str:
        return f"ScoreTable({len(self)} scores)"


class ScoredTrials:
    """One system's scores split by class.

    Keys and scores are parallel: ``pos_scores[i]`` belongs to ``pos_keys[i]``.
    Score arrays are read-only copies.
    """

    __slots__ = ("pos_scores", "neg_scores", "name", "_pos_keys", "_neg_keys", "_key_source")

    def __init__(self, pos_keys, pos_scores, neg_keys, neg_scores, name: str = ""):
        self._set_scores(pos_scores, neg_scores, name)
        self._pos_keys = tuple(pos_keys)
        self._neg_keys = tuple(neg_keys)
        self._key_source = None
        if len(self.pos_scores) != len(self._pos_keys) or len(self.neg_scores) != len(self._neg_keys):
            raise InputError("keys and scores differ in length")

    def _set_scores(self, pos_scores, neg_scores, name):
        pos = np.array(pos_scores, dtype=np.float64)
        neg = np.array(neg_scores, dtype=np.float64)
        if pos.ndim != 1 or neg.ndim != 1:
            raise InputError("scores must be one-dimensional")
        if not (np.isfinite(pos).all() and np.isfinite(neg).all()):
            raise InputError("scores must be finite")
        pos.flags.writeable = False
        neg.flags.writeable = False
        self.pos_scores = pos
        self.neg_scores = neg
        self.name = name

    @classmethod
    def _from_trials(cls, trials: TrialSet, values: np.ndarray, name: str) -> "ScoredTrials":
        # key tuples are only built if someone asks for them
        self = cls.__new__(cls)
        mask = trials.is_target
        self._set_scores(values[mask], values[~mask], name)
        self._pos_keys = self._neg_keys = None
        self._key_source = trials
        return self

    def _materialize_keys(self) -> None:
        trials, self._key_source = self._key_source, None
        mask = trials.is_target
        self._pos_keys = tuple(zip(compress(trials.enroll_ids, mask), compress(trials.test_ids, mask)))
        self._neg_keys = tuple(zip(compress(trials.enroll_ids, ~mask), compress(trials.test_ids, ~mask)))

    @property
    def pos_keys(self) -> tuple[TrialKey, ...]:
        if self._key_source is not None:
            self._materialize_keys()
        return self._pos_keys

    @property
    def neg_keys(self) -> tuple[TrialKey, ...]:
        if self._key_source is not None:
            self._materialize_keys()
        return self._neg_keys

    @classmethod
    def from_arrays(cls, pos_scores, neg_scores, name: str = "") -> "ScoredTrials":
        """Build with synthetic keys ``pos_<i>`` / ``neg_<i>``."""
        pos_keys = tuple((f"pos_{i}", f"pos_{i}_test") for i in range(len(pos_scores)))
        neg_keys = tuple((f"neg_{i}", f"neg_{i}_test") for i in range(len(neg_scores)))
        return cls(pos_keys, pos_scores, neg_keys, neg_scores, name)

    @property
    def positives(self) -> list[tuple[TrialKey, float]]:
        return list(zip(self.pos_keys, self.pos_scores.tolist()))

    @property
    def negatives(self) -> list[tuple[TrialKey, float]]:
        return list(zip(self.neg_keys, self.neg_scores.tolist()))

    @property
    def num_positives(self) -> int:
        return len(self.pos_scores)

    @property
    def num_negatives(self) -> int:
        return len(self.neg_scores)

    def with_scores(self, pos_scores, neg_scores) -> "ScoredTrials":
        """Same keys, new scores (e.g. after a score transform)."""
        return ScoredTrials(self.pos_keys, pos_scores, self.neg_keys, neg_scores, self.name)

    def require_both_classes(self) -> None:
        if not len(self.pos_scores) or not len(self.neg_scores):
            raise EvaluationError(
                f"need both classes: {len(self.pos_scores)} positive, {len(self.neg_scores)} negative trials"
            )

    def __repr__(self) -> str:
        return f"ScoredTrials({self.name!r}, positives={len(self.pos_scores)}, negatives={len(self.neg_scores)})"


# --- parsing ---------------------------------------------------------------

# widest line the C reader is given; longer lines use the line parser
_MAX_FAST_WIDTH = 256
_HEAD_BYTES = 1 << 16


def _screen(data: bytes) -> int | None:
    """Field width for the C reader, or None if the bytes need the line parser.

    Comments, non-ASCII, stray control bytes and very long lines all go to
    the line parser. The width is the longest line, so no token can be
    truncated.
    """
    if not data.isascii() or b"#" in data:
        return None
    n_cr = data.count(b"\r") if b"\r" in data else 0
    if n_cr and n_cr != data.count(b"\r\n"):
        return None
    if not data or data.isspace():
        return None
    b = np.frombuffer(data, dtype=np.uint8)
    newlines = np.flatnonzero(b == 10)
    # any control byte besides TAB, LF and CR(LF) goes to the slow path
    n_ctrl = np.count_nonzero(b < 32)
    if n_ctrl and n_ctrl != len(newlines) + n_cr + (data.count(b"\t") if b"\t" in data else 0):
        return None
    width = int(np.diff(newlines, prepend=-1, append=b.size).max())
    return width if width <= _MAX_FAST_WIDTH else None


def _fast_table(data: bytes, third: str, path: str | Path | None = None) -> np.ndarray | None:
    """Read three whitespace-separated columns with numpy's C reader.

    Returns a structured array with bytes fields ``e`` and ``t`` and a third
    field ``c`` of dtype ``third`` (``"S"`` or ``"f8"``), or None whenever the
    line parser has to take over. ``path``, when given, must hold ``data``;
    numpy then reads the file in chunks instead of line by line.
    """
    width = _screen(data)
    if width is None:
        return None
    # fields sized from the head of the file; any field filled to its last
    # byte may have been cut short, so that read is redone at full width
    guess = min(width, (max(map(len, data[:_HEAD_BYTES].split()), default=1) + 15) // 8 * 8)
    n_text = 3 if third == "S" else 2
    for w in dict.fromkeys((guess, width)):
        dtype = [("e", f"S{w}"), ("t", f"S{w}"), ("c", f"S{w}" if third == "S" else third)]
        source = os.fspath(path) if path is not None else io.StringIO(data.decode("ascii"))
        try:
            table = np.loadtxt(source, dtype=dtype, comments=None, ndmin=1, quotechar=None, encoding="ascii")
        except ValueError:
            return None
        if w == width:
            return table
        raw = table.view(np.uint8).reshape(len(table), table.dtype.itemsize)
        if not raw[:, [w * (k + 1) - 1 for k in range(n_text)]].any():
            return table
    return None


def _target_mask(labels: np.ndarray) -> np.ndarray | None:
    """Target flags for a bytes label column, None if any label is unknown."""
    is_target = labels == TARGET.encode()
    known = is_target | (labels == NONTARGET.encode())
    if not known.all():
        rest = {x.lower() for x in labels[~known].tolist()}
        if not rest <= {TARGET.encode(), NONTARGET.encode()}:
            return None
        is_target = np.char.lower(labels) == TARGET.encode()
    return is_target


def _lines(text: str | Iterable[str]) -> Iterator[str]:
    if isinstance(text, str):
        return iter(text.splitlines())
    return iter(text)


def _records(text, source):
    for lineno, raw in enumerate(_lines(text), 1):
        line = raw.strip()
        if not line or line[0] == "#":
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(f"expected 3 fields, found {len(parts)}", lineno, source)
        yield lineno, parts


def _slow_trials(text, source) -> tuple[list, list, list]:
    enroll, test, labels = [], [], []
    for lineno, (e, t, label) in _records(text, source):
        label = label.lower()
        if label not in LABELS:
            raise ParseError(f"unknown label {label!r}", lineno, source)
        enroll.append(e)
        test.append(t)
        labels.append(label == TARGET)
    return enroll, test, labels


def _trials_from_table(table: np.ndarray | None) -> TrialSet | None:
    is_target = None if table is None else _target_mask(table["c"])
    if is_target is None:
        return None
    try:
        return TrialSet._from_key_bytes(table["e"], table["t"], is_target)
    except InputError:
        return None  # duplicates: let the line parser name the line


def parse_trials(text: str | Iterable[str], source: str | None = None) -> TrialSet:
    """Parse a trial-key listing into a TrialSet (order preserved)."""
    if isinstance(text, str) and text.isascii():
        trials = _trials_from_table(_fast_table(text.encode("ascii"), "S"))
        if trials is not None:
            return trials
    columns = _slow_trials(text, source)
    try:
        return TrialSet.from_columns(*columns)
    except InputError as exc:
        raise ParseError(str(exc), _dup_line(text, source), source) from None


def _dup_line(text, source) -> int | None:
    seen = set()
    for lineno, (e, t, _) in _records(text, source):
        if (e, t) in seen:
            return lineno
        seen.add((e, t))
    return None


def _slow_scores(text, source) -> ScoreTable:
    entries: dict[TrialKey, float] = {}
    isfinite = math.isfinite
    for lineno, (enroll, test, tok) in _records(text, source):
        try:
            value = float(tok)
        except ValueError:
            raise ParseError(f"unparseable score {tok!r}", lineno, source) from None
        if not isfinite(value):
            raise ParseError(f"non-finite score {tok!r}", lineno, source)
        key = (enroll, test)
        if key in entries:
            raise ParseError(f"duplicate key {enroll} {test}", lineno, source)
        entries[key] = value
    return ScoreTable(entries)


def parse_scores(text: str | Iterable[str], source: str | None = None) -> ScoreTable:
    """Parse a score listing; duplicate keys and non-finite scores are errors."""
    if isinstance(text, str) and text.isascii():
        table = _score_table(_fast_table(text.encode("ascii"), "f8"))
        if table is not None:
            return table
    return _slow_scores(text, source)


def _score_table(table: np.ndarray | None) -> ScoreTable | None:
    if table is None or not np.isfinite(table["c"]).all():
        return None
    scores = ScoreTable._from_columns(
        table["e"].astype(str).tolist(), table["t"].astype(str).tolist(), np.array(table["c"])
    )
    # duplicates: let the line parser name the line
    return scores if len(scores.entries) == len(scores) else None


# --- writing ---------------------------------------------------------------


def write_trials(trials: TrialSet) -> str:
    labels = [TARGET if x else NONTARGET for x in trials.is_target.tolist()]
    return "".join(f"{e} {t} {lab}\n" for e, t, lab in zip(trials.enroll_ids, trials.test_ids, labels))


def write_scores(scores: ScoreTable) -> str:
    # repr() round-trips doubles exactly
    return "".join(f"{e} {t} {v!r}\n" for e, t, v in zip(scores.enroll_ids, scores.test_ids, scores.values.tolist()))


def scored_to_files(scored: ScoredTrials) -> tuple[str, str]:
    """Render a ScoredTrials back into (trials text, scores text), positives first."""
    trials_lines, score_lines = [], []
    for label, keys, values in (
        (TARGET, scored.pos_keys, scored.pos_scores.tolist()),
        (NONTARGET, scored.neg_keys, scored.neg_scores.tolist()),
    ):
        for (e, t), v in zip(keys, values):
            trials_lines.append(f"{e} {t} {label}\n")
            score_lines.append(f"{e} {t} {v!r}\n")
    return "".join(trials_lines), "".join(score_lines)


# --- joining ---------------------------------------------------------------


def _split(trials: TrialSet, values: np.ndarray, name: str) -> ScoredTrials:
    return ScoredTrials._from_trials(trials, values, name)


def join(trials: TrialSet, scores: ScoreTable, name: str = "") -> ScoredTrials:
    """Attach scores to trials, partitioning by label in trial order."""
    if trials.enroll_ids == scores.enroll_ids and trials.test_ids == scores.test_ids:
        return _split(trials, scores.values, name)
    table = scores.entries
    keys = trials.keys()
    missing = [k for k in keys if k not in table]
    if missing:
        shown = ", ".join(f"{e} {t}" for e, t in missing[:10])
        raise InputError(f"{len(missing)} trial(s) missing from score table: {shown}")
    values = np.fromiter((table[k] for k in keys), dtype=np.float64, count=len(keys))
    return _split(trials, values, name)


# --- files -----------------------------------------------------------------


def _read_bytes(path: str | Path, what: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {what} file {path}: {exc.strerror}") from None


def _decode(data: bytes, path: str | Path, what: str) -> str:
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError:
        raise InputError(f"{what} file {path} is not valid UTF-8") from None


def _read(path: str | Path, what: str) -> str:
    return _decode(_read_bytes(path, what), path, what)


def read_trials(path: str | Path) -> TrialSet:
    data = _read_bytes(path, "trials")
    trials = _trials_from_table(_fast_table(data, "S", path))
    if trials is not None:
        return trials
    return parse_trials(_decode(data, path, "trials"), str(path))


def read_scores(path: str | Path) -> ScoreTable:
    data = _read_bytes(path, "scores")
    table = _score_table(_fast_table(data, "f8", path))
    if table is not None:
        return table
    return parse_scores(_decode(data, path, "scores"), str(path))


def load_scored(trials: TrialSet, scores_path: str | Path, name: str | None = None) -> ScoredTrials:
    """Read a score file and join it with ``trials``.

    When the score file lists exactly the trial keys in trial order, the
    duplicate check is inherited from the (already unique) trial keys and no
    hash table is built.
    """
    data = _read_bytes(scores_path, "scores")
    name = Path(scores_path).stem if name is None else name
    key_bytes = trials._key_bytes
    if key_bytes is not None:
        table = _fast_table(data, "f8", scores_path)
        if (
            table is not None
            and np.array_equal(table["e"], key_bytes[0])
            and np.array_equal(table["t"], key_bytes[1])
            and np.isfinite(table["c"]).all()
        ):
            return _split(trials, np.array(table["c"]), name)
    return join(trials, parse_scores(_decode(data, scores_path, "scores"), str(scores_path)), name)
