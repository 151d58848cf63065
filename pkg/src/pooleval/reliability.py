"""Nested-pool incompleteness analysis.

Judging pools truncated at increasing sizes give increasingly stable
effectiveness estimates. This module builds nested pools (each a subset
of the next), restricts judgments to each truncation, and reports how
much per-system mean scores move at each size step. Early steps should
move scores a lot and late steps barely at all; flat late rows are the
evidence that the full pool size was big enough.
"""

from __future__ import annotations

import csv
import io
import json
import statistics
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .measures import DEFAULT_MEASURES, MeasureSpec, evaluate, parse_measures
from .model import Qrels, RankedRun
from .pooling import Pool, build_pool


@dataclass(frozen=True)
class IncrementConfig:
    """Nested-pool sweep settings.

    Sizes run min_size, min_size+step, ... up to max_size. The smallest
    size must cover the google+noise base so every pool truly nests.
    """

    min_size: int = 20
    max_size: int = 100
    step: int = 5
    k_google: int = 10
    k_noise: int = 10
    seed: int = 0
    measures: tuple[str, ...] = DEFAULT_MEASURES
    # Which side of the step divides the absolute score change: the
    # smaller pool's mean (default) or the larger's.
    denominator: str = "smaller"
    binary_ndcg: bool = False

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError("step must be positive")
        if self.min_size > self.max_size:
            raise ValueError("min_size must not exceed max_size")
        if self.min_size < self.k_google + self.k_noise:
            raise ValueError("min_size must cover the google+noise base")
        if self.denominator not in ("smaller", "larger"):
            raise ValueError("denominator must be 'smaller' or 'larger'")
        # A single size is allowed: it yields no adjacent pairs, so the
        # analysis degenerates to an empty table rather than an error.
        parse_measures(self.measures)

    def sizes(self) -> tuple[int, ...]:
        return tuple(range(self.min_size, self.max_size + 1, self.step))


@dataclass(frozen=True)
class IncrementCell:
    """Aggregate score movement for one measure over one size step."""

    mean_pct: float
    max_pct: float
    system_count: int
    excluded_systems: tuple[str, ...] = ()

    @property
    def undefined(self) -> bool:
        return self.system_count == 0


@dataclass(frozen=True)
class IncrementRow:
    from_size: int
    to_size: int
    cells: Mapping[str, IncrementCell]

    def __post_init__(self):
        if self.from_size >= self.to_size:
            raise ValueError("from_size must be below to_size")


@dataclass(frozen=True)
class IncrementTable:
    config: IncrementConfig
    measures: tuple[str, ...]
    rows: tuple[IncrementRow, ...]
    diagnostics: tuple[str, ...] = field(default=())


def nested_pools(
    topic_id: str,
    pooling_runs: Sequence[RankedRun],
    google_top: Sequence[str],
    noise_docs: Sequence[str],
    sizes: Sequence[int],
    *,
    k_google: int,
    k_noise: int,
    seed: int,
) -> list[Pool]:
    """One pool per size, smallest to largest, each nested in the next.

    All pools share the seed, so the noise sample and the ranked growth
    order coincide and nesting follows from pool monotonicity in k.
    """
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("sizes must be strictly increasing")
    if sizes and sizes[0] < k_google + k_noise:
        raise ValueError(
            f"smallest size {sizes[0]} is below the google+noise base "
            f"{k_google + k_noise}"
        )
    pools = [
        build_pool(
            topic_id,
            pooling_runs,
            google_top,
            noise_docs,
            k=size,
            k_google=k_google,
            k_noise=k_noise,
            seed=seed,
        )
        for size in sizes
    ]
    for smaller, larger in zip(pools, pools[1:]):
        if not smaller.doc_ids() <= larger.doc_ids():
            raise AssertionError(
                f"topic {topic_id}: pool of {smaller.k} not nested in {larger.k}"
            )
    return pools


def restrict_qrels(qrels: Qrels, pool: Pool) -> Qrels:
    """Judgments for the pool's topic limited to its members."""
    members = pool.doc_ids()
    return Qrels(
        entries={
            (topic_id, doc_id): grade
            for (topic_id, doc_id), grade in qrels.entries.items()
            if topic_id == pool.topic_id and doc_id in members
        }
    )


def restrict_qrels_to_pools(qrels: Qrels, pools: Sequence[Pool]) -> Qrels:
    """Judgments limited to (topic, doc) pairs inside some pool."""
    members = {pool.topic_id: pool.doc_ids() for pool in pools}
    return Qrels(
        entries={
            (topic_id, doc_id): grade
            for (topic_id, doc_id), grade in qrels.entries.items()
            if doc_id in members.get(topic_id, frozenset())
        }
    )


def increment_analysis(
    systems: Sequence[RankedRun],
    qrels: Qrels,
    pooling_runs: Sequence[RankedRun],
    google_top: Mapping[str, Sequence[str]],
    noise_docs: Sequence[str],
    config: IncrementConfig,
    *,
    crawled_docs: Mapping[str, Iterable[str]] | None = None,
) -> IncrementTable:
    """Score every system against each nested pool size and report the
    per-step percentage movement of the per-system means.

    For each adjacent size pair the per-system change is
    |mean(to) - mean(from)| / mean(denominator side) * 100, with means
    taken over topics first. Systems whose denominator mean is zero are
    excluded from that cell and named in the diagnostics.
    """
    if not systems:
        raise ValueError("need at least one system to analyse")
    sizes = config.sizes()
    topic_ids = sorted(qrels.topics())
    pools_by_size: dict[int, list[Pool]] = {size: [] for size in sizes}
    for topic_id in topic_ids:
        for pool in nested_pools(
            topic_id,
            pooling_runs,
            google_top.get(topic_id, ()),
            noise_docs,
            sizes,
            k_google=config.k_google,
            k_noise=config.k_noise,
            seed=config.seed,
        ):
            pools_by_size[pool.k].append(pool)

    specs = parse_measures(config.measures)
    labels = [str(spec) for spec in specs]
    # size -> system_id -> measure label -> mean over topics
    means: dict[int, dict[str, dict[str, float]]] = {}
    for size in sizes:
        restricted = restrict_qrels_to_pools(qrels, pools_by_size[size])
        result = evaluate(
            systems,
            restricted,
            specs,
            crawled_docs=crawled_docs,
            binary_ndcg=config.binary_ndcg,
        )
        means[size] = {
            system.system_id: {
                label: system.summaries[label].mean
                for label in labels
                if label in system.summaries
            }
            for system in result.systems
        }

    diagnostics: list[str] = []
    rows = []
    for from_size, to_size in zip(sizes, sizes[1:]):
        cells: dict[str, IncrementCell] = {}
        for label in labels:
            deltas = []
            excluded = []
            for run in systems:
                mean_from = means[from_size][run.system_id].get(label, 0.0)
                mean_to = means[to_size][run.system_id].get(label, 0.0)
                denom = mean_from if config.denominator == "smaller" else mean_to
                if denom == 0.0:
                    excluded.append(run.system_id)
                    continue
                deltas.append(abs(mean_to - mean_from) / denom * 100.0)
            if excluded:
                diagnostics.append(
                    f"{label} {from_size}->{to_size}: excluded zero-denominator "
                    f"system(s) " + ", ".join(excluded)
                )
            cells[label] = IncrementCell(
                mean_pct=statistics.fmean(deltas) if deltas else 0.0,
                max_pct=max(deltas) if deltas else 0.0,
                system_count=len(deltas),
                excluded_systems=tuple(excluded),
            )
            if not deltas:
                diagnostics.append(
                    f"{label} {from_size}->{to_size}: undefined, every system "
                    f"had a zero denominator"
                )
        rows.append(IncrementRow(from_size=from_size, to_size=to_size, cells=cells))

    return IncrementTable(
        config=config,
        measures=tuple(labels),
        rows=tuple(rows),
        diagnostics=tuple(diagnostics),
    )


def write_increment_table(table: IncrementTable) -> str:
    """Fixed-width text table: one row per size step, mean/max per measure."""
    header = ["sizes"] + [f"{label} mean%  max%" for label in table.measures]
    body = []
    for row in table.rows:
        cells = [f"{row.from_size} -> {row.to_size}"]
        for label in table.measures:
            cell = row.cells[label]
            if cell.undefined:
                cells.append("-")
            else:
                cells.append(f"{cell.mean_pct:.4f}  {cell.max_pct:.4f}")
        body.append(cells)
    widths = [
        max(len(header[i]), *(len(r[i]) for r in body)) if body else len(header[i])
        for i in range(len(header))
    ]
    lines = ["  ".join(h.ljust(widths[i]) for i, h in enumerate(header)).rstrip()]
    for cells in body:
        lines.append(
            "  ".join(c.ljust(widths[i]) for i, c in enumerate(cells)).rstrip()
        )
    return "\n".join(lines) + "\n"


def write_increment_csv(table: IncrementTable) -> str:
    """Long format for plotting: from,to,measure,mean_pct,max_pct,systems."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["from_size", "to_size", "measure", "mean_pct", "max_pct", "systems"])
    for row in table.rows:
        for label in table.measures:
            cell = row.cells[label]
            writer.writerow(
                [
                    row.from_size,
                    row.to_size,
                    label,
                    repr(cell.mean_pct),
                    repr(cell.max_pct),
                    cell.system_count,
                ]
            )
    return buffer.getvalue()


def write_increment_json(table: IncrementTable) -> str:
    payload = {
        "config": {
            "min_size": table.config.min_size,
            "max_size": table.config.max_size,
            "step": table.config.step,
            "k_google": table.config.k_google,
            "k_noise": table.config.k_noise,
            "seed": table.config.seed,
            "measures": list(table.config.measures),
            "denominator": table.config.denominator,
            "binary_ndcg": table.config.binary_ndcg,
        },
        "rows": [
            {
                "from_size": row.from_size,
                "to_size": row.to_size,
                "cells": {
                    label: {
                        "mean_pct": cell.mean_pct,
                        "max_pct": cell.max_pct,
                        "system_count": cell.system_count,
                        "excluded_systems": list(cell.excluded_systems),
                    }
                    for label, cell in row.cells.items()
                },
            }
            for row in table.rows
        ],
        "diagnostics": list(table.diagnostics),
    }
    return json.dumps(payload, indent=2) + "\n"


__all__ = [
    "IncrementConfig",
    "IncrementCell",
    "IncrementRow",
    "IncrementTable",
    "nested_pools",
    "restrict_qrels",
    "restrict_qrels_to_pools",
    "increment_analysis",
    "write_increment_table",
    "write_increment_csv",
    "write_increment_json",
]
