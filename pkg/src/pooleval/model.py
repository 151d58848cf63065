"""Domain types for test-collection construction and evaluation.

All types are immutable values after construction and validate their own
invariants, so instances can be shared freely across parallel workers.
"""

from __future__ import annotations

import re
import statistics
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .cleaning import word_count

TOPIC_ID_PATTERN = re.compile(r"^\d{4}-\d{3}$")

#: Valid judgment grades. -1 marks a document that could not be rendered;
#: it is treated as nonrelevant by every measure.
GRADES = (-1, 0, 1, 2)

#: Relevance levels a non-noise topic must describe.
RELEVANCE_LEVELS = (0, 1, 2)


@dataclass(frozen=True)
class Topic:
    """An information need: the title doubles as the query string.

    Noise topics exist only to seed pools with decoy documents; they carry
    no relevance-level descriptions.
    """

    id: str
    title: str
    levels: Mapping[int, str] = field(default_factory=dict)
    is_noise: bool = False

    def __post_init__(self):
        if not TOPIC_ID_PATTERN.match(self.id):
            raise ValueError(f"topic id {self.id!r} does not match YYYY-NNN")
        if not self.title.strip():
            raise ValueError(f"topic {self.id}: title must be non-empty")
        if self.is_noise:
            if self.levels:
                raise ValueError(f"noise topic {self.id} must not define relevance levels")
        else:
            missing = [g for g in RELEVANCE_LEVELS if g not in self.levels]
            if missing:
                raise ValueError(f"topic {self.id}: missing relevance level(s) {missing}")
            extra = [g for g in self.levels if g not in RELEVANCE_LEVELS]
            if extra:
                raise ValueError(f"topic {self.id}: unknown relevance level(s) {extra}")


def validate_topic_set(topics: Sequence[Topic]) -> None:
    """Reject duplicate topic ids."""
    seen = set()
    for topic in topics:
        if topic.id in seen:
            raise ValueError(f"duplicate topic id {topic.id!r}")
        seen.add(topic.id)


@dataclass(frozen=True)
class DocRecord:
    """A crawled document plus the topics it was crawled for."""

    doc_id: str
    source_topics: frozenset[str]
    content: bytes
    url: str | None = None

    def __post_init__(self):
        if not self.doc_id:
            raise ValueError("doc_id must be non-empty")
        if not self.source_topics:
            raise ValueError(f"doc {self.doc_id}: source_topics must be non-empty")
        object.__setattr__(self, "source_topics", frozenset(self.source_topics))


@dataclass(frozen=True)
class RankedRun:
    """One system's ordered retrieval results, keyed by topic.

    The stored order is the ranking; ranks are implicitly 1..n per topic.
    """

    system_id: str
    rankings: Mapping[str, tuple[tuple[str, float], ...]]

    def __post_init__(self):
        if not self.system_id:
            raise ValueError("system_id must be non-empty")
        for topic_id, entries in self.rankings.items():
            seen = set()
            for doc_id, _score in entries:
                if doc_id in seen:
                    raise ValueError(
                        f"run {self.system_id}, topic {topic_id}: duplicate doc {doc_id!r}"
                    )
                seen.add(doc_id)

    @classmethod
    def from_scores(
        cls, system_id: str, scored: Mapping[str, Iterable[tuple[str, float]]]
    ) -> "RankedRun":
        """Build a run from unordered (doc, score) pairs.

        Entries are ordered by non-increasing score; ties keep input order,
        which makes ranks deterministic.
        """
        rankings = {}
        for topic_id, pairs in scored.items():
            ordered = sorted(pairs, key=lambda pair: pair[1], reverse=True)
            rankings[topic_id] = tuple((doc, float(score)) for doc, score in ordered)
        return cls(system_id=system_id, rankings=rankings)

    def topics(self) -> list[str]:
        return sorted(self.rankings)

    def ranking(self, topic_id: str) -> list[str]:
        """Doc ids in rank order for a topic; empty when the topic is absent."""
        return [doc for doc, _ in self.rankings.get(topic_id, ())]

    def scored(self, topic_id: str) -> tuple[tuple[str, float], ...]:
        return self.rankings.get(topic_id, ())


@dataclass(frozen=True)
class Qrels:
    """Graded relevance judgments: (topic, doc) -> grade in {-1, 0, 1, 2}."""

    entries: Mapping[tuple[str, str], int]

    def __post_init__(self):
        for (topic_id, doc_id), grade in self.entries.items():
            if grade not in GRADES:
                raise ValueError(
                    f"qrels ({topic_id}, {doc_id}): grade {grade} outside {GRADES}"
                )

    def topics(self) -> list[str]:
        return sorted({topic_id for topic_id, _ in self.entries})

    def grades_for(self, topic_id: str) -> dict[str, int]:
        return {
            doc_id: grade
            for (tid, doc_id), grade in self.entries.items()
            if tid == topic_id
        }

    def relevant_docs(self, topic_id: str) -> set[str]:
        """Docs judged relevant (grade >= 1) for a topic."""
        return {
            doc_id
            for (tid, doc_id), grade in self.entries.items()
            if tid == topic_id and grade >= 1
        }

    def __len__(self) -> int:
        return len(self.entries)


def conflate_binary(qrels: Qrels) -> Qrels:
    """Collapse the graded scale to binary: 1 and 2 become 1, 0 and -1 become 0.

    Idempotent; the key set is unchanged.
    """
    return Qrels(
        entries={key: (1 if grade >= 1 else 0) for key, grade in qrels.entries.items()}
    )


@dataclass(frozen=True)
class DistributionSummary:
    mean: float
    median: float


@dataclass(frozen=True)
class CollectionStats:
    """Size and word statistics over a document collection."""

    doc_count: int
    total_bytes: int
    words_per_doc: DistributionSummary
    bytes_per_doc: DistributionSummary
    per_topic_downloads: Mapping[str, int]

    def __post_init__(self):
        if self.doc_count < 0 or self.total_bytes < 0:
            raise ValueError("counts must be non-negative")
        for topic_id, count in self.per_topic_downloads.items():
            if count < 0:
                raise ValueError(f"topic {topic_id}: negative download count")


def _summary(values: list[int]) -> DistributionSummary:
    if not values:
        return DistributionSummary(mean=0.0, median=0.0)
    # Lower middle value for even-sized samples.
    return DistributionSummary(
        mean=statistics.fmean(values), median=float(statistics.median_low(values))
    )


def collection_stats(docs: Sequence[DocRecord]) -> CollectionStats:
    """Compute collection statistics.

    Word counts are whitespace tokens of the tag-stripped page text. A doc
    crawled for several topics contributes to each topic's download count.
    """
    words = [word_count(doc.content) for doc in docs]
    sizes = [len(doc.content) for doc in docs]
    per_topic: Counter[str] = Counter()
    for doc in docs:
        per_topic.update(doc.source_topics)
    return CollectionStats(
        doc_count=len(docs),
        total_bytes=sum(sizes),
        words_per_doc=_summary(words),
        bytes_per_doc=_summary(sizes),
        per_topic_downloads=dict(sorted(per_topic.items())),
    )


def check_qrels_references(qrels: Qrels, known_doc_ids: Iterable[str]) -> list[str]:
    """Diagnostics for judged docs that do not resolve against the manifest."""
    known = set(known_doc_ids)
    return [
        f"qrels references unknown doc {doc_id!r} (topic {topic_id})"
        for (topic_id, doc_id) in sorted(qrels.entries)
        if doc_id not in known
    ]
