"""Ranked-retrieval effectiveness measures and run evaluation.

All measures score one ranked list against one topic's judgments and
return a float in [0, 1]. Topics whose score is undefined for a measure
(no relevant docs for recall-style measures, all-zero gains for NDCG)
raise UndefinedScoreError; evaluate() excludes them from that measure's
summary instead of treating them as zeros.
"""

from __future__ import annotations

import csv
import io
import json
import math
import statistics
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .model import Qrels, RankedRun


class UndefinedScoreError(ValueError):
    """The measure has no defined value for this topic."""


def _binary(grades: Mapping[str, int]) -> dict[str, int]:
    return {doc: 1 if grade >= 1 else 0 for doc, grade in grades.items()}


def precision_at_k(ranking: Sequence[str], grades: Mapping[str, int], k: int) -> float:
    """Fraction of the first k positions holding a relevant doc.

    The denominator is always k, so short rankings are penalised rather
    than excused.
    """
    if k <= 0:
        raise ValueError("k must be positive")
    rel = _binary(grades)
    hits = sum(rel.get(doc, 0) for doc in ranking[:k])
    return hits / k


def recall_at_k(ranking: Sequence[str], grades: Mapping[str, int], k: int) -> float:
    """Fraction of all relevant docs retrieved in the first k positions."""
    if k <= 0:
        raise ValueError("k must be positive")
    rel = _binary(grades)
    total = sum(rel.values())
    if total == 0:
        raise UndefinedScoreError("no relevant documents")
    hits = sum(rel.get(doc, 0) for doc in ranking[:k])
    return hits / total


def average_precision_at_k(
    ranking: Sequence[str], grades: Mapping[str, int], k: int
) -> float:
    """Mean of precision at each relevant rank within the top k.

    Divides by the full relevant count, not the count reachable within k,
    so truncation costs score.
    """
    if k <= 0:
        raise ValueError("k must be positive")
    rel = _binary(grades)
    total = sum(rel.values())
    if total == 0:
        raise UndefinedScoreError("no relevant documents")
    hits = 0
    precision_sum = 0.0
    for position, doc in enumerate(ranking[:k], 1):
        if rel.get(doc, 0):
            hits += 1
            precision_sum += hits / position
    return precision_sum / total


def reciprocal_rank(ranking: Sequence[str], grades: Mapping[str, int]) -> float:
    """1 / rank of the first relevant doc over the whole list, 0 if none."""
    rel = _binary(grades)
    for position, doc in enumerate(ranking, 1):
        if rel.get(doc, 0):
            return 1.0 / position
    return 0.0


def ndcg_at_k(
    ranking: Sequence[str],
    grades: Mapping[str, int],
    k: int,
    *,
    binary: bool = False,
) -> float:
    """Normalised discounted cumulative gain over the first k positions.

    Gain is 2^grade - 1 with grade -1 and unjudged docs contributing 0;
    the ideal ordering ranks judged docs by grade. Topics whose judged
    gains are all zero have no ideal and are undefined.
    """
    if k <= 0:
        raise ValueError("k must be positive")
    if binary:
        grades = _binary(grades)
    gains = {doc: (2 ** grade - 1 if grade > 0 else 0.0) for doc, grade in grades.items()}
    ideal = sorted(gains.values(), reverse=True)
    if not ideal or ideal[0] == 0.0:
        raise UndefinedScoreError("all judged grades are zero")
    dcg = sum(
        gains.get(doc, 0.0) / math.log2(position + 1)
        for position, doc in enumerate(ranking[:k], 1)
    )
    idcg = sum(
        gain / math.log2(position + 1)
        for position, gain in enumerate(ideal[:k], 1)
    )
    return dcg / idcg


def coverage_at_k(
    ranking: Sequence[str], crawled_for_topic: Iterable[str], k: int
) -> float:
    """Fraction of the first min(k, len) positions drawn from the topic's
    own crawl. Empty rankings score 0."""
    if k <= 0:
        raise ValueError("k must be positive")
    head = ranking[:k]
    if not head:
        return 0.0
    crawled = set(crawled_for_topic)
    return sum(1 for doc in head if doc in crawled) / len(head)


# --- measure registry ---

DEFAULT_MEASURES = ("ndcg@100", "ap@100", "p@10", "rr", "r@100")


@dataclass(frozen=True)
class MeasureSpec:
    """A measure name plus its cutoff, e.g. p@10 or rr."""

    name: str
    cutoff: int | None = None

    def __str__(self) -> str:
        if self.cutoff is None:
            return self.name
        return f"{self.name}@{self.cutoff}"


_CUTOFF_MEASURES = {"ndcg", "ap", "p", "r", "c"}
_PLAIN_MEASURES = {"rr"}


def parse_measure(label: str) -> MeasureSpec:
    text = label.strip().lower()
    if "@" in text:
        name, _, cutoff_text = text.partition("@")
        if name not in _CUTOFF_MEASURES:
            raise ValueError(f"unknown measure {label!r}")
        try:
            cutoff = int(cutoff_text)
        except ValueError:
            raise ValueError(f"bad cutoff in {label!r}") from None
        if cutoff <= 0:
            raise ValueError(f"cutoff must be positive in {label!r}")
        return MeasureSpec(name=name, cutoff=cutoff)
    if text in _PLAIN_MEASURES:
        return MeasureSpec(name=text)
    if text in _CUTOFF_MEASURES:
        raise ValueError(f"measure {label!r} needs a cutoff, e.g. {label}@10")
    raise ValueError(f"unknown measure {label!r}")


def parse_measures(labels: Iterable[str]) -> tuple[MeasureSpec, ...]:
    specs = tuple(parse_measure(label) for label in labels)
    if len({str(spec) for spec in specs}) != len(specs):
        raise ValueError("duplicate measures")
    return specs


@dataclass(frozen=True)
class MeasureSummary:
    """Per-system aggregate of one measure over its defined topics."""

    mean: float
    stdev: float
    topic_count: int


@dataclass(frozen=True)
class SystemResult:
    system_id: str
    # str(MeasureSpec) -> topic_id -> score; only defined topics appear.
    scores: Mapping[str, Mapping[str, float]]
    summaries: Mapping[str, MeasureSummary]


@dataclass(frozen=True)
class EvalResult:
    measures: tuple[MeasureSpec, ...]
    systems: tuple[SystemResult, ...]
    # Every judged topic, including ones excluded for some measure.
    topics: tuple[str, ...] = field(default=())
    # Human-readable notes about skipped topics or measures.
    diagnostics: tuple[str, ...] = field(default=())

    def system(self, system_id: str) -> SystemResult:
        for result in self.systems:
            if result.system_id == system_id:
                return result
        raise KeyError(system_id)


def _score_one(
    spec: MeasureSpec,
    ranking: Sequence[str],
    grades: Mapping[str, int],
    crawled: Iterable[str],
    *,
    binary_ndcg: bool,
) -> float:
    if spec.name == "p":
        return precision_at_k(ranking, grades, spec.cutoff)
    if spec.name == "r":
        return recall_at_k(ranking, grades, spec.cutoff)
    if spec.name == "ap":
        return average_precision_at_k(ranking, grades, spec.cutoff)
    if spec.name == "rr":
        return reciprocal_rank(ranking, grades)
    if spec.name == "ndcg":
        return ndcg_at_k(ranking, grades, spec.cutoff, binary=binary_ndcg)
    if spec.name == "c":
        return coverage_at_k(ranking, crawled, spec.cutoff)
    raise ValueError(f"unknown measure {spec}")


def _summarise(scores: Mapping[str, float]) -> MeasureSummary:
    values = list(scores.values())
    mean = statistics.fmean(values) if values else 0.0
    stdev = statistics.stdev(values) if len(values) > 1 else 0.0
    return MeasureSummary(mean=mean, stdev=stdev, topic_count=len(values))


def evaluate(
    runs: Sequence[RankedRun],
    qrels: Qrels,
    measures: Iterable[MeasureSpec | str] = DEFAULT_MEASURES,
    *,
    crawled_docs: Mapping[str, Iterable[str]] | None = None,
    binary_ndcg: bool = False,
) -> EvalResult:
    """Score every run over the topics the qrels cover.

    Run topics without judgments are skipped with a diagnostic; judged
    topics missing from a run score as empty rankings. Coverage measures
    need crawled_docs (topic -> crawled doc ids) and are skipped with a
    diagnostic otherwise.
    """
    specs = parse_measures(
        str(m) if isinstance(m, MeasureSpec) else m for m in measures
    )
    seen_ids = set()
    for run in runs:
        if run.system_id in seen_ids:
            raise ValueError(f"duplicate system id {run.system_id!r}")
        seen_ids.add(run.system_id)

    topics = sorted(qrels.topics())
    diagnostics: list[str] = []
    needs_crawl = [spec for spec in specs if spec.name == "c"]
    if needs_crawl and crawled_docs is None:
        diagnostics.append(
            "skipped " + ", ".join(str(s) for s in needs_crawl)
            + ": no crawled-docs mapping supplied"
        )
        specs = tuple(spec for spec in specs if spec.name != "c")

    skipped: dict[str, set[str]] = {}
    systems = []
    for run in runs:
        extra = sorted(set(run.topics()) - set(topics))
        if extra:
            diagnostics.append(
                f"{run.system_id}: skipped {len(extra)} unjudged topic(s): "
                + ", ".join(extra[:5])
            )
        scores: dict[str, dict[str, float]] = {str(spec): {} for spec in specs}
        for topic_id in topics:
            ranking = run.ranking(topic_id)
            grades = qrels.grades_for(topic_id)
            crawled = (crawled_docs or {}).get(topic_id, ())
            for spec in specs:
                try:
                    value = _score_one(
                        spec, ranking, grades, crawled, binary_ndcg=binary_ndcg
                    )
                except UndefinedScoreError:
                    skipped.setdefault(str(spec), set()).add(topic_id)
                    continue
                scores[str(spec)][topic_id] = value
        systems.append(
            SystemResult(
                system_id=run.system_id,
                scores={label: dict(topic_scores) for label, topic_scores in scores.items()},
                summaries={
                    label: _summarise(topic_scores)
                    for label, topic_scores in scores.items()
                },
            )
        )
    for label, topic_ids in sorted(skipped.items()):
        diagnostics.append(
            f"{label}: undefined for topic(s) " + ", ".join(sorted(topic_ids))
        )
    return EvalResult(
        measures=specs,
        systems=tuple(systems),
        topics=tuple(topics),
        diagnostics=tuple(diagnostics),
    )


def leaderboard(result: EvalResult) -> list[SystemResult]:
    """Systems best first: mean ndcg@100, then ap@100, then system id."""

    def sort_key(system: SystemResult):
        def mean_of(label: str) -> float:
            summary = system.summaries.get(label)
            return summary.mean if summary is not None else 0.0

        return (-mean_of("ndcg@100"), -mean_of("ap@100"), system.system_id)

    return sorted(result.systems, key=sort_key)


def write_leaderboard(result: EvalResult) -> str:
    """Fixed-width text table, one row per system, 4-decimal floats."""
    rows = leaderboard(result)
    labels = [str(spec) for spec in result.measures]
    header = ["system"] + [f"{label} (sd)" for label in labels]
    body = []
    for system in rows:
        cells = [system.system_id]
        for label in labels:
            summary = system.summaries.get(label)
            if summary is None or summary.topic_count == 0:
                cells.append("-")
            else:
                cells.append(f"{summary.mean:.4f} ({summary.stdev:.4f})")
        body.append(cells)
    widths = [
        max(len(header[i]), *(len(row[i]) for row in body)) if body else len(header[i])
        for i in range(len(header))
    ]
    lines = [
        "  ".join(header[i].ljust(widths[i]) for i in range(len(header))).rstrip()
    ]
    for row in body:
        lines.append(
            "  ".join(row[i].ljust(widths[i]) for i in range(len(row))).rstrip()
        )
    return "\n".join(lines) + "\n"


def write_scores_csv(result: EvalResult) -> str:
    """One row per (system, measure): mean, stdev, then per-topic columns.

    A topic excluded for a measure leaves its cell empty. Floats keep
    full precision; the 4-decimal rounding is for text tables only.
    """
    topics = list(result.topics)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["system", "measure", "mean", "stdev"] + topics)
    for system in result.systems:
        for spec in result.measures:
            label = str(spec)
            summary = system.summaries[label]
            scores = system.scores.get(label, {})
            row = [system.system_id, label, repr(summary.mean), repr(summary.stdev)]
            row.extend(
                repr(scores[topic_id]) if topic_id in scores else ""
                for topic_id in topics
            )
            writer.writerow(row)
    return buffer.getvalue()


def write_eval_json(result: EvalResult) -> str:
    """Full-precision JSON with per-topic scores and summaries."""
    payload = {
        "measures": [str(spec) for spec in result.measures],
        "topics": list(result.topics),
        "systems": [
            {
                "system_id": system.system_id,
                "scores": {
                    label: dict(sorted(topic_scores.items()))
                    for label, topic_scores in system.scores.items()
                },
                "summaries": {
                    label: {
                        "mean": summary.mean,
                        "stdev": summary.stdev,
                        "topic_count": summary.topic_count,
                    }
                    for label, summary in system.summaries.items()
                },
            }
            for system in result.systems
        ],
        "diagnostics": list(result.diagnostics),
    }
    return json.dumps(payload, indent=2, sort_keys=False) + "\n"


__all__ = [
    "UndefinedScoreError",
    "precision_at_k",
    "recall_at_k",
    "average_precision_at_k",
    "reciprocal_rank",
    "ndcg_at_k",
    "coverage_at_k",
    "DEFAULT_MEASURES",
    "MeasureSpec",
    "parse_measure",
    "parse_measures",
    "MeasureSummary",
    "SystemResult",
    "EvalResult",
    "evaluate",
    "leaderboard",
    "write_leaderboard",
    "write_scores_csv",
    "write_eval_json",
]
