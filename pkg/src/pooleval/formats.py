"""Parsers and writers for the interchange file formats.

Formats covered:
  - topic XML:      <topic id> / <title> / <relevance> / <level value>
  - run lines:      ``topic Q0 doc rank score tag``
  - qrels lines:    ``topic 0 doc grade``
  - doc manifests:  ``doc_id<TAB>relative_path<TAB>topic_id[,topic_id...]``

Writers normalize whitespace and ordering, so parse -> write -> parse is a
fixpoint for every format.
"""

from __future__ import annotations

import warnings
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence
from xml.sax.saxutils import escape, quoteattr

from .model import GRADES, DocRecord, Qrels, RankedRun, Topic, validate_topic_set


class ParseError(ValueError):
    """Malformed input; carries the 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"{message} (line {line})" if line is not None else message)


class RunFormatWarning(UserWarning):
    """Recoverable run-file irregularity, e.g. gaps in the rank sequence."""


# --- topics ---


def parse_topics(xml_text: str) -> list[Topic]:
    """Parse a topic file.

    The root may be a single <topic> or any element containing <topic>
    children. Topics without a <relevance> element are noise topics.
    """
    try:
        root = ET.fromstring(xml_text)
    except ET.ParseError as exc:
        line = exc.position[0] if exc.position else None
        raise ParseError(f"malformed topic XML: {exc.msg}", line=line) from exc

    elements = [root] if root.tag == "topic" else root.findall("topic")
    topics = []
    for element in elements:
        topic_id = element.get("id")
        if not topic_id:
            raise ParseError("<topic> element without id attribute")
        title_el = element.find("title")
        if title_el is None or not (title_el.text or "").strip():
            raise ParseError(f"topic {topic_id}: missing or empty <title>")
        relevance = element.find("relevance")
        levels: dict[int, str] = {}
        if relevance is not None:
            for level in relevance.findall("level"):
                value = level.get("value")
                try:
                    grade = int(value)  # type: ignore[arg-type]
                except (TypeError, ValueError):
                    raise ParseError(
                        f"topic {topic_id}: <level> value {value!r} is not an integer"
                    ) from None
                if grade in levels:
                    raise ParseError(f"topic {topic_id}: duplicate level {grade}")
                levels[grade] = (level.text or "").strip()
        topics.append(
            Topic(
                id=topic_id,
                title=title_el.text.strip(),  # type: ignore[union-attr]
                levels=levels,
                is_noise=relevance is None,
            )
        )
    validate_topic_set(topics)
    return topics


def write_topics(topics: Sequence[Topic]) -> str:
    """Serialize topics; levels are written highest grade first."""
    lines = ["<topics>"]
    for topic in topics:
        lines.append(f"<topic id={quoteattr(topic.id)}>")
        lines.append(f"<title>{escape(topic.title)}</title>")
        if not topic.is_noise:
            lines.append("<relevance>")
            for grade in sorted(topic.levels, reverse=True):
                lines.append(
                    f'<level value="{grade}">{escape(topic.levels[grade])}</level>'
                )
            lines.append("</relevance>")
        lines.append("</topic>")
    lines.append("</topics>")
    return "\n".join(lines) + "\n"


# --- runs ---


def parse_run(text: str) -> RankedRun:
    """Parse run lines ``topic Q0 doc rank score tag``.

    Entries are grouped by topic and ordered by the given rank; gaps or
    repeats in a topic's rank sequence reorder with a RunFormatWarning.
    """
    per_topic: dict[str, list[tuple[int, str, float]]] = {}
    seen: set[tuple[str, str]] = set()
    system_id: str | None = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        if not raw.strip():
            continue
        fields = raw.split()
        if len(fields) != 6:
            raise ParseError(f"expected 6 fields, got {len(fields)}", line=lineno)
        topic_id, _q0, doc_id, rank_s, score_s, tag = fields
        try:
            rank = int(rank_s)
        except ValueError:
            raise ParseError(f"non-numeric rank {rank_s!r}", line=lineno) from None
        try:
            score = float(score_s)
        except ValueError:
            raise ParseError(f"non-numeric score {score_s!r}", line=lineno) from None
        if system_id is None:
            system_id = tag
        elif tag != system_id:
            raise ParseError(
                f"run tag changed from {system_id!r} to {tag!r}", line=lineno
            )
        if (topic_id, doc_id) in seen:
            raise ParseError(f"duplicate doc {doc_id!r} for topic {topic_id}", line=lineno)
        seen.add((topic_id, doc_id))
        per_topic.setdefault(topic_id, []).append((rank, doc_id, score))

    if system_id is None:
        raise ParseError("empty run file")

    rankings = {}
    for topic_id, entries in per_topic.items():
        ranks = [rank for rank, _, _ in entries]
        if ranks != list(range(1, len(entries) + 1)):
            warnings.warn(
                f"topic {topic_id}: rank sequence has gaps or disorder; "
                "reordered by given rank",
                RunFormatWarning,
                stacklevel=2,
            )
            entries.sort(key=lambda entry: entry[0])
        rankings[topic_id] = tuple((doc, score) for _, doc, score in entries)
    return RankedRun(system_id=system_id, rankings=rankings)


def write_run(run: RankedRun) -> str:
    lines = []
    for topic_id in run.topics():
        for rank, (doc_id, score) in enumerate(run.scored(topic_id), 1):
            lines.append(f"{topic_id} Q0 {doc_id} {rank} {score} {run.system_id}")
    return "\n".join(lines) + ("\n" if lines else "")


# --- qrels ---


def parse_qrels(text: str) -> Qrels:
    """Parse qrels lines ``topic 0 doc grade``."""
    entries: dict[tuple[str, str], int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        if not raw.strip():
            continue
        fields = raw.split()
        if len(fields) != 4:
            raise ParseError(f"expected 4 fields, got {len(fields)}", line=lineno)
        topic_id, _zero, doc_id, grade_s = fields
        try:
            grade = int(grade_s)
        except ValueError:
            raise ParseError(f"non-numeric grade {grade_s!r}", line=lineno) from None
        if grade not in GRADES:
            raise ParseError(f"grade {grade} outside {GRADES}", line=lineno)
        if (topic_id, doc_id) in entries:
            raise ParseError(
                f"duplicate judgment for topic {topic_id}, doc {doc_id!r}", line=lineno
            )
        entries[(topic_id, doc_id)] = grade
    return Qrels(entries=entries)


def write_qrels(qrels: Qrels) -> str:
    lines = [
        f"{topic_id} 0 {doc_id} {qrels.entries[(topic_id, doc_id)]}"
        for topic_id, doc_id in sorted(qrels.entries)
    ]
    return "\n".join(lines) + ("\n" if lines else "")


# --- document manifests ---


@dataclass(frozen=True)
class ManifestEntry:
    """One collection document: id, path relative to the docs root, and the
    topics it was crawled for."""

    doc_id: str
    path: str
    source_topics: frozenset[str]

    def __post_init__(self):
        if not self.source_topics:
            raise ValueError(f"manifest entry {self.doc_id}: no source topics")
        object.__setattr__(self, "source_topics", frozenset(self.source_topics))


def parse_manifest(text: str) -> list[ManifestEntry]:
    entries = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        if not raw.strip():
            continue
        fields = raw.split("\t")
        if len(fields) != 3:
            raise ParseError(
                f"expected 3 tab-separated fields, got {len(fields)}", line=lineno
            )
        doc_id, path, topics_field = fields
        if doc_id in seen:
            raise ParseError(f"duplicate doc id {doc_id!r}", line=lineno)
        seen.add(doc_id)
        topics = frozenset(t for t in topics_field.split(",") if t)
        if not topics:
            raise ParseError(f"doc {doc_id!r} lists no source topics", line=lineno)
        entries.append(ManifestEntry(doc_id=doc_id, path=path, source_topics=topics))
    return entries


def write_manifest(entries: Sequence[ManifestEntry]) -> str:
    lines = [
        f"{entry.doc_id}\t{entry.path}\t{','.join(sorted(entry.source_topics))}"
        for entry in sorted(entries, key=lambda e: e.doc_id)
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def source_topics_map(entries: Iterable[ManifestEntry]) -> dict[str, frozenset[str]]:
    """doc_id -> topics it was crawled for, as used by the crawl-ratio measure."""
    return {entry.doc_id: entry.source_topics for entry in entries}


def load_doc_records(
    entries: Iterable[ManifestEntry], docs_root: Path | str
) -> list[DocRecord]:
    """Materialize manifest entries by reading document bytes from disk."""
    root = Path(docs_root)
    return [
        DocRecord(
            doc_id=entry.doc_id,
            source_topics=entry.source_topics,
            content=(root / entry.path).read_bytes(),
        )
        for entry in entries
    ]
