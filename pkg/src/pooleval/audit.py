"""Judgment quality control via noise-document hit rates.

Each pool carries a few documents crawled for unrelated decoy topics.
An assessor who marks many of them relevant was probably not reading
carefully, so the audit counts the grades noise docs received and flags
topic/assessor cells whose noise-relevant rate exceeds a threshold.

A high rate is evidence, not proof: a decoy doc can genuinely satisfy
the topic, so reports surface flags for human review instead of acting
on them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

from .judging import JudgmentEvent
from .model import GRADES, Qrels

DEFAULT_FLAG_THRESHOLD = 0.5

ADVISORY_NOTE = (
    "Noise documents can be genuinely relevant to a topic they were not "
    "crawled for; review flagged cells before discounting an assessor."
)


@dataclass(frozen=True)
class NoiseCell:
    """Noise-doc judgment tallies for one (assessor, topic) cell.

    assessor_id is None when the audit input carries no assessor
    identity (plain qrels).
    """

    assessor_id: str | None
    topic_id: str
    judged: int
    relevant: int

    @property
    def relevant_rate(self) -> float:
        return self.relevant / self.judged if self.judged else 0.0


@dataclass(frozen=True)
class AuditFlag:
    assessor_id: str | None
    topic_id: str
    reason: str


@dataclass(frozen=True)
class AuditReport:
    total_noise_judgments: int
    counts: Mapping[int, int]
    rates: Mapping[int, float]
    cells: tuple[NoiseCell, ...]
    flags: tuple[AuditFlag, ...]
    # Noise docs present in a pool but never judged, per topic.
    missing: Mapping[str, tuple[str, ...]]
    flag_threshold: float = DEFAULT_FLAG_THRESHOLD

    def __post_init__(self):
        if sum(self.counts.values()) != self.total_noise_judgments:
            raise ValueError("grade counts must sum to the total")


def _judged_grades(
    judgments: Union[Qrels, Sequence[JudgmentEvent]],
) -> dict[tuple[str | None, str, str], int]:
    """Latest grade per (assessor, topic, doc); assessor None for qrels."""
    if isinstance(judgments, Qrels):
        return {
            (None, topic_id, doc_id): grade
            for (topic_id, doc_id), grade in judgments.entries.items()
        }
    state: dict[tuple[str | None, str, str], int] = {}
    for event in judgments:
        state[(event.assessor_id, event.topic_id, event.doc_id)] = event.grade
    return state


def noise_audit(
    judgments: Union[Qrels, Sequence[JudgmentEvent]],
    noise_docs_by_topic: Mapping[str, Iterable[str]],
    *,
    flag_threshold: float = DEFAULT_FLAG_THRESHOLD,
) -> AuditReport:
    """Count the grades noise docs received and flag careless cells.

    A cell is flagged when strictly more than flag_threshold of its
    judged noise docs got grade 1 or 2. Grade -1 counts toward the
    total but never toward the relevant numerator.
    """
    if not 0.0 <= flag_threshold <= 1.0:
        raise ValueError("flag_threshold must be within [0, 1]")
    noise_sets = {
        topic_id: frozenset(docs) for topic_id, docs in noise_docs_by_topic.items()
    }
    grades = _judged_grades(judgments)

    counts = {grade: 0 for grade in GRADES}
    tallies: dict[tuple[str | None, str], list[int]] = {}
    judged_noise: dict[str, set[str]] = {topic_id: set() for topic_id in noise_sets}
    for (assessor_id, topic_id, doc_id), grade in grades.items():
        noise_docs = noise_sets.get(topic_id)
        if noise_docs is None or doc_id not in noise_docs:
            continue
        counts[grade] += 1
        judged_noise[topic_id].add(doc_id)
        cell = tallies.setdefault((assessor_id, topic_id), [0, 0])
        cell[0] += 1
        if grade >= 1:
            cell[1] += 1

    total = sum(counts.values())
    rates = {
        grade: (count / total if total else 0.0) for grade, count in counts.items()
    }
    cells = tuple(
        NoiseCell(
            assessor_id=assessor_id,
            topic_id=topic_id,
            judged=judged,
            relevant=relevant,
        )
        for (assessor_id, topic_id), (judged, relevant) in sorted(
            tallies.items(), key=lambda item: (item[0][1], item[0][0] or "")
        )
    )
    flags = tuple(
        AuditFlag(
            assessor_id=cell.assessor_id,
            topic_id=cell.topic_id,
            reason=(
                f"{cell.relevant}/{cell.judged} noise docs judged relevant "
                f"(rate {cell.relevant_rate:.2f} > threshold {flag_threshold:.2f})"
            ),
        )
        for cell in cells
        if cell.judged and cell.relevant_rate > flag_threshold
    )
    missing = {
        topic_id: tuple(sorted(noise_sets[topic_id] - judged_noise[topic_id]))
        for topic_id in sorted(noise_sets)
        if noise_sets[topic_id] - judged_noise[topic_id]
    }
    return AuditReport(
        total_noise_judgments=total,
        counts=counts,
        rates=rates,
        cells=cells,
        flags=flags,
        missing=missing,
        flag_threshold=flag_threshold,
    )


def write_audit_text(report: AuditReport) -> str:
    lines = [
        f"noise judgments: {report.total_noise_judgments}",
    ]
    for grade in (2, 1, 0, -1):
        count = report.counts.get(grade, 0)
        lines.append(
            f"  grade {grade:>2}: {count} ({report.rates.get(grade, 0.0) * 100:.2f}%)"
        )
    lines.append(f"flag threshold: {report.flag_threshold:.2f}")
    if report.flags:
        lines.append(f"flags ({len(report.flags)}):")
        for flag in report.flags:
            who = flag.assessor_id or "(unattributed)"
            lines.append(f"  {who} / {flag.topic_id}: {flag.reason}")
    else:
        lines.append("flags: none")
    if report.missing:
        lines.append("unjudged noise docs:")
        for topic_id, docs in report.missing.items():
            lines.append(f"  {topic_id}: {', '.join(docs)}")
    lines.append(f"note: {ADVISORY_NOTE}")
    return "\n".join(lines) + "\n"


def write_audit_json(report: AuditReport) -> str:
    payload = {
        "total_noise_judgments": report.total_noise_judgments,
        "counts": {str(grade): count for grade, count in sorted(report.counts.items())},
        "rates": {str(grade): rate for grade, rate in sorted(report.rates.items())},
        "cells": [
            {
                "assessor_id": cell.assessor_id,
                "topic_id": cell.topic_id,
                "judged": cell.judged,
                "relevant": cell.relevant,
                "relevant_rate": cell.relevant_rate,
            }
            for cell in report.cells
        ],
        "flags": [
            {
                "assessor_id": flag.assessor_id,
                "topic_id": flag.topic_id,
                "reason": flag.reason,
            }
            for flag in report.flags
        ],
        "missing": {topic: list(docs) for topic, docs in report.missing.items()},
        "flag_threshold": report.flag_threshold,
        "note": ADVISORY_NOTE,
    }
    return json.dumps(payload, indent=2) + "\n"


__all__ = [
    "DEFAULT_FLAG_THRESHOLD",
    "ADVISORY_NOTE",
    "NoiseCell",
    "AuditFlag",
    "AuditReport",
    "noise_audit",
    "write_audit_text",
    "write_audit_json",
]
