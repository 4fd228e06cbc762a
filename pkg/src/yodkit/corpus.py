"""Corpus ingestion, YOD histograms, balanced splits and sampling weights."""

from __future__ import annotations

import json
import math
import random
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from yodkit.readability import MAX_YOD_LEVEL, MIN_YOD_LEVEL, yod, yod_to_level
from yodkit.text_core import EmptyText, NoWords, compute_stats

LEVELS = tuple(range(MIN_YOD_LEVEL, MAX_YOD_LEVEL + 1))


class MalformedRecord(ValueError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class InsufficientLevel(ValueError):
    def __init__(self, level: int, available: int, required: int):
        super().__init__(
            f"YOD level {level} has {available} records, {required} required"
        )
        self.level = level
        self.available = available
        self.required = required


class EmptyHistogram(ValueError):
    pass


@dataclass(frozen=True)
class CorpusRecord:
    id: str
    source_text: str
    summary: str
    yod_level: int
    origin: str = ""

    def __post_init__(self):
        if not self.summary.strip():
            raise ValueError("summary must be non-empty")
        if not MIN_YOD_LEVEL <= self.yod_level <= MAX_YOD_LEVEL:
            raise ValueError(f"yod_level out of range: {self.yod_level}")

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "source": self.source_text,
            "summary": self.summary,
            "yod": self.yod_level,
            "origin": self.origin,
        }


@dataclass(frozen=True)
class YodHistogram:
    counts: tuple[int, ...] = (0,) * MAX_YOD_LEVEL

    def __getitem__(self, level: int) -> int:
        return self.counts[level - 1]

    @property
    def total(self) -> int:
        return sum(self.counts)

    def as_dict(self) -> dict[int, int]:
        return {level: self[level] for level in LEVELS}


@dataclass(frozen=True)
class SplitSpec:
    per_level_eval_quota: int = 20
    seed: int = 0

    def __post_init__(self):
        if self.per_level_eval_quota < 0:
            raise ValueError("quota must be non-negative")


@dataclass
class Splits:
    train: list[CorpusRecord] = field(default_factory=list)
    test: list[CorpusRecord] = field(default_factory=list)
    validation: list[CorpusRecord] = field(default_factory=list)

    def __iter__(self):
        return iter((self.train, self.test, self.validation))


def summary_yod_level(summary: str) -> int:
    """YOD level of a summary under this toolkit's Turkish pipeline."""
    try:
        value = yod(compute_stats(summary, "turkish")).value
    except (EmptyText, NoWords):
        value = 0.0
    return yod_to_level(value)


def _parse_level(raw, line: int) -> int:
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise MalformedRecord(line, f"yod must be a number, got {raw!r}")
    if isinstance(raw, float):
        if not math.isfinite(raw) or raw < 0:
            raise MalformedRecord(line, f"invalid yod value {raw!r}")
        return yod_to_level(raw)
    if not MIN_YOD_LEVEL <= raw <= MAX_YOD_LEVEL:
        raise MalformedRecord(line, f"yod level {raw} outside 1..16")
    return raw


def parse_record(obj, line: int) -> CorpusRecord:
    if not isinstance(obj, dict):
        raise MalformedRecord(line, "record is not a JSON object")
    summary = obj.get("summary")
    if not isinstance(summary, str) or not summary.strip():
        raise MalformedRecord(line, "missing or empty 'summary'")
    source = obj.get("source", "")
    if not isinstance(source, str):
        raise MalformedRecord(line, "'source' must be a string")
    rid = obj.get("id", f"line-{line}")
    raw_level = obj.get("yod")
    level = summary_yod_level(summary) if raw_level is None else _parse_level(raw_level, line)
    return CorpusRecord(
        id=str(rid),
        source_text=source,
        summary=summary,
        yod_level=level,
        origin=str(obj.get("origin", "")),
    )


def ingest(path: str | Path) -> tuple[list[CorpusRecord], list[MalformedRecord]]:
    """Read a JSONL corpus.

    Each line holds ``{id, source, summary, yod?, origin?}``. A missing
    ``yod`` is computed from the summary. Bad lines, including duplicate ids,
    are returned in the error list while the rest still parse. Blank lines
    are ignored.
    """
    path = Path(path)
    records: list[CorpusRecord] = []
    errors: list[MalformedRecord] = []
    seen: set[str] = set()
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                errors.append(MalformedRecord(lineno, f"invalid JSON ({exc.msg})"))
                continue
            try:
                record = parse_record(obj, lineno)
            except MalformedRecord as exc:
                errors.append(exc)
                continue
            if record.id in seen:
                errors.append(MalformedRecord(lineno, f"duplicate id {record.id!r}"))
                continue
            seen.add(record.id)
            records.append(record)
    return records, errors


def select_fitting(
    records: Sequence[CorpusRecord], max_words: int, limit: int | None = None
) -> list[CorpusRecord]:
    """Keep sources of at most ``max_words`` words, longest first.

    Stands in for picking the longest texts a model's tokenizer accepts
    without truncation. Ties keep input order.
    """
    fitting = [r for r in records if len(r.source_text.split()) <= max_words]
    fitting.sort(key=lambda r: -len(r.source_text.split()))
    return fitting if limit is None else fitting[:limit]


def histogram(records: Iterable[CorpusRecord]) -> YodHistogram:
    counts = [0] * MAX_YOD_LEVEL
    for r in records:
        counts[r.yod_level - 1] += 1
    return YodHistogram(tuple(counts))


def deficient_levels(records: Sequence[CorpusRecord], quota: int) -> list[InsufficientLevel]:
    hist = histogram(records)
    required = 2 * quota
    return [
        InsufficientLevel(level, hist[level], required)
        for level in LEVELS
        if 0 < hist[level] < required
    ]


def build_splits(records: Sequence[CorpusRecord], spec: SplitSpec) -> Splits:
    """Hold out ``quota`` records per present level for test and for validation.

    Selection is a seeded shuffle per level; every output list keeps the
    input order. Raises :class:`InsufficientLevel` for the first level with
    fewer than ``2 * quota`` records.
    """
    quota = spec.per_level_eval_quota
    deficits = deficient_levels(records, quota)
    if deficits:
        raise deficits[0]

    by_level: dict[int, list[int]] = defaultdict(list)
    for idx, r in enumerate(records):
        by_level[r.yod_level].append(idx)

    rng = random.Random(spec.seed)
    test_idx: set[int] = set()
    val_idx: set[int] = set()
    for level in LEVELS:
        members = list(by_level.get(level, ()))
        rng.shuffle(members)
        test_idx.update(members[:quota])
        val_idx.update(members[quota : 2 * quota])

    splits = Splits()
    for idx, r in enumerate(records):
        if idx in test_idx:
            splits.test.append(r)
        elif idx in val_idx:
            splits.validation.append(r)
        else:
            splits.train.append(r)
    return splits


def sampling_weights(hist: YodHistogram) -> np.ndarray:
    """Inverse-frequency per-level weights, scaled to mean 1 over present levels.

    Index ``i`` holds the weight of level ``i + 1``; absent levels get 0.
    """
    counts = np.asarray(hist.counts, dtype=np.float64)
    nonzero = counts > 0
    if not nonzero.any():
        raise EmptyHistogram("histogram has no records")
    weights = np.zeros(MAX_YOD_LEVEL, dtype=np.float64)
    weights[nonzero] = counts.sum() / counts[nonzero]
    weights[nonzero] /= weights[nonzero].mean()
    return weights


def weighted_draw(
    levels: Sequence[int], weights: np.ndarray, n: int, seed: int
) -> np.ndarray:
    """Draw ``n`` record indices with replacement, P(i) proportional to weights[level_i - 1]."""
    per_record = np.asarray([weights[level - 1] for level in levels], dtype=np.float64)
    if per_record.sum() <= 0:
        raise EmptyHistogram("no record carries positive weight")
    rng = np.random.default_rng(seed)
    return rng.choice(len(per_record), size=n, replace=True, p=per_record / per_record.sum())


def token_length_stats(records: Iterable[CorpusRecord]) -> dict[int, float]:
    """Mean whitespace-token count of summaries per level; absent levels omitted."""
    totals: dict[int, list[int]] = defaultdict(list)
    for r in records:
        totals[r.yod_level].append(len(r.summary.split()))
    return {level: sum(v) / len(v) for level, v in sorted(totals.items())}


def histogram_report(records: Sequence[CorpusRecord]) -> dict:
    hist = histogram(records)
    weights = sampling_weights(hist) if hist.total else np.zeros(MAX_YOD_LEVEL)
    lengths = token_length_stats(records)
    rows = []
    for level in LEVELS:
        rows.append(
            {
                "level": level,
                "count": hist[level],
                "weight": float(weights[level - 1]),
                "avg_tokens": lengths.get(level),
            }
        )
    return {"total": hist.total, "levels": rows}


def write_jsonl(path: Path, records: Iterable[CorpusRecord]) -> None:
    with path.open("w", encoding="utf-8") as fh:
        for r in records:
            fh.write(json.dumps(r.to_json(), ensure_ascii=False, sort_keys=True))
            fh.write("\n")
