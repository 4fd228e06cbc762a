"""Summary scoring (ROUGE-1/2/L, METEOR, BLEU) and readability-control reports."""

from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from yodkit.readability import (
    DEFAULT_TOLERANCE,
    MAX_YOD_LEVEL,
    MIN_YOD_LEVEL,
    YOD_GROUPS,
    yod,
    yod_success,
)
from yodkit.text_core import EmptyText, NoWords, compute_stats, tokenize_words, turkish_lower

METRICS = ("rouge1", "rouge2", "rougeL", "meteor", "bleu")
REPORT_COLUMNS = METRICS + ("success_rate",)


class EmptyRun(ValueError):
    pass


@dataclass(frozen=True)
class MetricScore:
    """One metric for one candidate/reference pair.

    For ROUGE, ``f1_or_score`` is the F1. For METEOR it is the penalised
    F-mean. For BLEU, ``precision`` is the geometric mean of the n-gram
    precisions and ``recall`` holds the brevity penalty.
    """

    metric: str
    precision: float
    recall: float
    f1_or_score: float


def metric_tokens(text: str) -> list[str]:
    return [turkish_lower(t.surface) for t in tokenize_words(text)]


def ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(candidate: Sequence[str], reference: Sequence[str], n: int = 1) -> MetricScore:
    if n < 1:
        raise ValueError("n must be >= 1")
    name = f"rouge{n}"
    cand, ref = ngrams(candidate, n), ngrams(reference, n)
    c_total, r_total = sum(cand.values()), sum(ref.values())
    if c_total == 0 or r_total == 0:
        return MetricScore(name, 0.0, 0.0, 0.0)
    matches = sum((cand & ref).values())
    # 2m/(c+r) equals 2PR/(P+R) and is exactly symmetric under swapping sides.
    return MetricScore(name, matches / c_total, matches / r_total, 2 * matches / (c_total + r_total))


def lcs_length(a: Sequence, b: Sequence) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, start=1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def rouge_l(candidate: Sequence[str], reference: Sequence[str]) -> MetricScore:
    if not candidate or not reference:
        return MetricScore("rougeL", 0.0, 0.0, 0.0)
    lcs = lcs_length(candidate, reference)
    c, r = len(candidate), len(reference)
    return MetricScore("rougeL", lcs / c, lcs / r, 2 * lcs / (c + r))


def align_exact(candidate: Sequence[str], reference: Sequence[str]) -> list[tuple[int, int]]:
    """Left-to-right exact-match alignment as (candidate_pos, reference_pos) pairs.

    Each candidate token takes the reference position continuing the current
    chunk when one is free, else the earliest free match. The match count is
    always maximal; the chunk count approximates the minimum.
    """
    free: dict[str, list[int]] = {}
    for j, tok in enumerate(reference):
        free.setdefault(tok, []).append(j)
    pairs: list[tuple[int, int]] = []
    prev_ref = None
    for i, tok in enumerate(candidate):
        slots = free.get(tok)
        if not slots:
            prev_ref = None
            continue
        if prev_ref is not None and prev_ref + 1 in slots:
            j = prev_ref + 1
        else:
            j = slots[0]
        slots.remove(j)
        pairs.append((i, j))
        prev_ref = j
    return pairs


def count_chunks(pairs: Sequence[tuple[int, int]]) -> int:
    chunks = 0
    last = None
    for i, j in pairs:
        if last is None or not (i == last[0] + 1 and j == last[1] + 1):
            chunks += 1
        last = (i, j)
    return chunks


def meteor(
    candidate: Sequence[str],
    reference: Sequence[str],
    alpha: float = 0.9,
    beta: float = 3.0,
    gamma: float = 0.5,
) -> MetricScore:
    pairs = align_exact(candidate, reference)
    m = len(pairs)
    if m == 0:
        return MetricScore("meteor", 0.0, 0.0, 0.0)
    p, r = m / len(candidate), m / len(reference)
    f_mean = p * r / (alpha * p + (1 - alpha) * r)
    penalty = gamma * (count_chunks(pairs) / m) ** beta
    return MetricScore("meteor", p, r, f_mean * (1 - penalty))


def bleu(
    candidate: Sequence[str], reference: Sequence[str], max_n: int = 4, epsilon: float = 1e-9
) -> MetricScore:
    """Sentence BLEU with zero n-gram precisions floored at ``epsilon``."""
    if max_n < 1:
        raise ValueError("max_n must be >= 1")
    if not candidate or not reference:
        return MetricScore("bleu", 0.0, 0.0, 0.0)
    log_sum = 0.0
    for n in range(1, max_n + 1):
        cand, ref = ngrams(candidate, n), ngrams(reference, n)
        total = sum(cand.values())
        matched = sum((cand & ref).values())
        precision = matched / total if total and matched else epsilon
        log_sum += math.log(precision)
    geo = math.exp(log_sum / max_n)
    c, r = len(candidate), len(reference)
    bp = 1.0 if c >= r else math.exp(1 - r / c)
    return MetricScore("bleu", geo, bp, geo * bp)


def score_pair(candidate: str | Sequence[str], reference: str | Sequence[str]) -> dict[str, float]:
    cand = metric_tokens(candidate) if isinstance(candidate, str) else list(candidate)
    ref = metric_tokens(reference) if isinstance(reference, str) else list(reference)
    return {
        "rouge1": rouge_n(cand, ref, 1).f1_or_score,
        "rouge2": rouge_n(cand, ref, 2).f1_or_score,
        "rougeL": rouge_l(cand, ref).f1_or_score,
        "meteor": meteor(cand, ref).f1_or_score,
        "bleu": bleu(cand, ref).f1_or_score,
    }


def text_yod(text: str) -> float:
    try:
        return yod(compute_stats(text, "turkish")).value
    except (EmptyText, NoWords):
        return 0.0


@dataclass(frozen=True)
class EvalPair:
    candidate: str
    reference: str
    target_level: int
    achieved_yod: Optional[float] = None
    id: str = ""


@dataclass(frozen=True)
class PairResult:
    id: str
    target_level: int
    achieved_yod: float
    success: bool
    scores: dict


@dataclass
class ReportRow:
    label: str
    count: int
    values: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"label": self.label, "count": self.count, **self.values}


@dataclass
class EvalReport:
    tolerance: float
    per_level: list[ReportRow]
    per_group: list[ReportRow]
    overall: ReportRow
    pairs: list[PairResult] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "tolerance": self.tolerance,
            "per_level": [r.to_json() for r in self.per_level],
            "per_group": [r.to_json() for r in self.per_group],
            "overall": self.overall.to_json(),
        }


def _aggregate(label: str, results: Sequence[PairResult]) -> ReportRow:
    if not results:
        return ReportRow(label, 0, {k: None for k in REPORT_COLUMNS})
    n = len(results)
    # Exact rational means rounded once, so the result ignores pair order.
    values = {m: float(sum(Fraction(r.scores[m]) for r in results) / n) for m in METRICS}
    values["success_rate"] = float(Fraction(sum(r.success for r in results), n))
    return ReportRow(label, n, values)


def evaluate_pairs(
    pairs: Iterable[EvalPair | tuple], tolerance: float = DEFAULT_TOLERANCE
) -> list[PairResult]:
    results = []
    for k, pair in enumerate(pairs):
        if not isinstance(pair, EvalPair):
            pair = EvalPair(*pair)
        if not MIN_YOD_LEVEL <= pair.target_level <= MAX_YOD_LEVEL:
            raise ValueError(f"target level out of range: {pair.target_level}")
        achieved = text_yod(pair.candidate) if pair.achieved_yod is None else pair.achieved_yod
        results.append(
            PairResult(
                id=pair.id or str(k),
                target_level=pair.target_level,
                achieved_yod=achieved,
                success=yod_success(achieved, pair.target_level, tolerance),
                scores=score_pair(pair.candidate, pair.reference),
            )
        )
    return results


def build_report(results: Sequence[PairResult], tolerance: float) -> EvalReport:
    if not results:
        raise EmptyRun("no prediction pairs to evaluate")
    by_level = {level: [] for level in range(MIN_YOD_LEVEL, MAX_YOD_LEVEL + 1)}
    for r in results:
        by_level[r.target_level].append(r)
    per_level = [_aggregate(str(level), rs) for level, rs in by_level.items()]
    per_group = []
    for lo, hi, _name in YOD_GROUPS:
        members = [r for level in range(lo, hi + 1) for r in by_level[level]]
        label = f"{lo}-{hi}" if lo != hi else str(lo)
        per_group.append(_aggregate(label, members))
    return EvalReport(tolerance, per_level, per_group, _aggregate("all", results), list(results))


def evaluate_run(
    pairs: Iterable[EvalPair | tuple], tolerance: float = DEFAULT_TOLERANCE
) -> EvalReport:
    """Score every pair, then average per target level, per education group and overall.

    Averages are plain means over pairs, so a group row is the count-weighted
    mean of its level rows. Means are computed exactly and rounded once, so
    they do not depend on pair order. A missing ``achieved_yod`` is measured on the
    candidate text.
    """
    return build_report(evaluate_pairs(pairs, tolerance), tolerance)


def _fmt(value) -> str:
    return "-" if value is None else f"{value:.4f}"


def render_table(rows: Sequence[ReportRow], first_column: str) -> str:
    header = [first_column, "n", *REPORT_COLUMNS]
    body = [[r.label, str(r.count), *(_fmt(r.values[c]) for c in REPORT_COLUMNS)] for r in rows]
    widths = [max(len(row[i]) for row in [header, *body]) for i in range(len(header))]
    lines = ["  ".join(cell.rjust(w) for cell, w in zip(row, widths)) for row in [header, *body]]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def render_csv(rows: Sequence[ReportRow], first_column: str) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([first_column, "n", *REPORT_COLUMNS])
    for r in rows:
        writer.writerow([r.label, r.count, *(_fmt(r.values[c]) for c in REPORT_COLUMNS)])
    return buf.getvalue()
