"""Append-only judgment event log and qrels export.

Every grade an assessor assigns becomes one JSON line in a log file.
The log is the single source of truth: re-judgments append rather than
rewrite, and the current grade for an (assessor, topic, doc) triple is
the latest line. Exports replay the log, so they are pure functions of
its contents.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .model import GRADES, Qrels


def utc_now_iso() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


@dataclass(frozen=True)
class JudgmentEvent:
    """One grading action. Log position, not timestamp, decides recency."""

    assessor_id: str
    topic_id: str
    doc_id: str
    grade: int
    timestamp: str

    def __post_init__(self):
        if not self.assessor_id or not self.topic_id or not self.doc_id:
            raise ValueError("assessor_id, topic_id and doc_id must be non-empty")
        if self.grade not in GRADES:
            raise ValueError(f"grade must be one of {GRADES}, got {self.grade!r}")

    def to_json(self) -> str:
        return json.dumps(
            {
                "assessor_id": self.assessor_id,
                "topic_id": self.topic_id,
                "doc_id": self.doc_id,
                "grade": self.grade,
                "timestamp": self.timestamp,
            },
            sort_keys=True,
            separators=(",", ":"),
        )

    @classmethod
    def from_json(cls, line: str) -> "JudgmentEvent":
        record = json.loads(line)
        return cls(
            assessor_id=record["assessor_id"],
            topic_id=record["topic_id"],
            doc_id=record["doc_id"],
            grade=record["grade"],
            timestamp=record["timestamp"],
        )


class EventLog:
    """JSON-lines judgment log with serialized appends.

    Writes go through one lock so concurrent handlers produce a total
    order; each append is flushed and fsynced before returning.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()

    def append(self, event: JudgmentEvent) -> None:
        line = event.to_json() + "\n"
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as handle:
                handle.write(line)
                handle.flush()
                os.fsync(handle.fileno())

    def events(self) -> list[JudgmentEvent]:
        if not self.path.exists():
            return []
        return load_events(self.path.read_text(encoding="utf-8"))


def load_events(text: str) -> list[JudgmentEvent]:
    events = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            events.append(JudgmentEvent.from_json(line))
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            raise ValueError(f"bad event on line {lineno}: {exc}") from None
    return events


def replay(
    events: Iterable[JudgmentEvent],
) -> dict[tuple[str, str, str], int]:
    """Latest grade per (assessor, topic, doc), in log order."""
    state: dict[tuple[str, str, str], int] = {}
    for event in events:
        state[(event.assessor_id, event.topic_id, event.doc_id)] = event.grade
    return state


def export_qrels(events: Sequence[JudgmentEvent]) -> Qrels:
    """Merged qrels: the latest grade per (topic, doc) across assessors."""
    entries: dict[tuple[str, str], int] = {}
    for event in events:
        entries[(event.topic_id, event.doc_id)] = event.grade
    return Qrels(entries=entries)


def export_qrels_by_assessor(events: Sequence[JudgmentEvent]) -> dict[str, Qrels]:
    """One qrels per assessor, so doubly judged topics stay separable."""
    per_assessor: dict[str, dict[tuple[str, str], int]] = {}
    for event in events:
        per_assessor.setdefault(event.assessor_id, {})[
            (event.topic_id, event.doc_id)
        ] = event.grade
    return {
        assessor_id: Qrels(entries=entries)
        for assessor_id, entries in sorted(per_assessor.items())
    }


def progress(
    events: Iterable[JudgmentEvent],
    pool_sizes: Mapping[str, int],
) -> dict[str, tuple[int, int]]:
    """(judged, total) per topic, counting docs not events.

    A doc counts as judged once any assessor has graded it, whatever the
    grade, including -1.
    """
    judged: dict[str, set[str]] = {}
    for event in events:
        judged.setdefault(event.topic_id, set()).add(event.doc_id)
    return {
        topic_id: (len(judged.get(topic_id, ())), total)
        for topic_id, total in sorted(pool_sizes.items())
    }


__all__ = [
    "JudgmentEvent",
    "EventLog",
    "load_events",
    "replay",
    "export_qrels",
    "export_qrels_by_assessor",
    "progress",
    "utc_now_iso",
]
