"""Size-k judging pools seeded with search-engine and noise documents.

A pool is grown from a base set (top search results plus randomly sampled
noise docs) by unioning every pooling system's top-d results, increasing d
until the pool holds at least k unique documents. The depth actually
reached is recorded per topic.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .formats import ManifestEntry, ParseError
from .model import RankedRun

PROVENANCE_GOOGLE = "google"
PROVENANCE_NOISE = "noise"
PROVENANCE_POOLED = "pooled"
PROVENANCES = (PROVENANCE_GOOGLE, PROVENANCE_NOISE, PROVENANCE_POOLED)


@dataclass(frozen=True)
class PoolEntry:
    """A pool member and how it got there.

    first_depth is the smallest depth at which any pooling system
    contributed the doc; present exactly for pooled provenance.
    """

    doc_id: str
    provenance: str
    first_depth: int | None = None

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        if (self.provenance == PROVENANCE_POOLED) != (self.first_depth is not None):
            raise ValueError(
                f"doc {self.doc_id}: first_depth must be present exactly for "
                f"pooled entries"
            )
        if self.first_depth is not None and self.first_depth < 1:
            raise ValueError(f"doc {self.doc_id}: first_depth must be >= 1")


@dataclass(frozen=True)
class Pool:
    """Judging set for one topic.

    Base documents (google, noise) are always members regardless of k.
    presentation_order is the seeded shuffle shown to assessors, so they
    cannot tell where a document came from.
    """

    topic_id: str
    k: int
    depth: int
    entries: tuple[PoolEntry, ...]
    presentation_order: tuple[str, ...]
    exhausted: bool
    k_google: int
    k_noise: int
    seed: int

    def __post_init__(self):
        ids = [entry.doc_id for entry in self.entries]
        if len(ids) != len(set(ids)):
            raise ValueError(f"pool {self.topic_id}: duplicate entries")
        if sorted(self.presentation_order) != sorted(ids):
            raise ValueError(
                f"pool {self.topic_id}: presentation_order is not a permutation "
                f"of the entries"
            )
        if len(self.entries) < self.k and not self.exhausted:
            raise ValueError(
                f"pool {self.topic_id}: {len(self.entries)} entries < k={self.k} "
                f"but not marked exhausted"
            )

    @property
    def size(self) -> int:
        return len(self.entries)

    def doc_ids(self) -> frozenset[str]:
        return frozenset(entry.doc_id for entry in self.entries)

    def noise_doc_ids(self) -> frozenset[str]:
        return frozenset(
            e.doc_id for e in self.entries if e.provenance == PROVENANCE_NOISE
        )


def _dedupe(docs: Iterable[str]) -> list[str]:
    seen = set()
    out = []
    for doc in docs:
        if doc not in seen:
            seen.add(doc)
            out.append(doc)
    return out


def pool_union_at_depth(
    pooling_runs: Sequence[RankedRun],
    topic_id: str,
    base_doc_ids: Iterable[str],
    depth: int,
) -> set[str]:
    """Union of the base set with every pooling run's top-``depth`` docs."""
    members = set(base_doc_ids)
    for run in pooling_runs:
        members.update(run.ranking(topic_id)[:depth])
    return members


def build_pool(
    topic_id: str,
    pooling_runs: Sequence[RankedRun],
    google_top: Sequence[str],
    noise_docs: Sequence[str],
    *,
    k: int,
    k_google: int,
    k_noise: int,
    seed: int,
) -> Pool:
    """Build the size-k pool for one topic.

    The base set is the first k_google search docs plus k_noise noise docs
    sampled without replacement (seed-deterministic per topic). Depth then
    grows from 0 until the union holds at least k docs; if every pooling
    list is consumed first the pool is flagged exhausted instead of
    erroring, which keeps desk-scale inputs usable.
    """
    if k < 0 or k_google < 0 or k_noise < 0:
        raise ValueError("k, k_google and k_noise must be non-negative")
    run_lists = [run.ranking(topic_id) for run in pooling_runs]
    if not any(run_lists):
        raise ValueError(f"topic {topic_id}: no pooling results")

    google_pool = _dedupe(google_top)
    noise_pool = _dedupe(noise_docs)
    clash = set(google_pool) & set(noise_pool)
    if clash:
        raise ValueError(
            f"topic {topic_id}: google and noise inputs must be disjoint, "
            f"both contain {sorted(clash)[:5]}"
        )

    google_base = google_pool[:k_google]
    noise_rng = random.Random(f"{seed}/{topic_id}/noise")
    # Sample from the sorted candidates so the pick is a function of the
    # candidate set, not of the order the caller happened to supply.
    noise_base = sorted(
        noise_rng.sample(sorted(noise_pool), min(k_noise, len(noise_pool)))
    )
    base = {doc: PROVENANCE_GOOGLE for doc in google_base}
    base.update({doc: PROVENANCE_NOISE for doc in noise_base})

    # Smallest depth at which any pooling system returns each doc.
    first_depth: dict[str, int] = {}
    for ranked in run_lists:
        for position, doc in enumerate(ranked, 1):
            if doc not in base and position < first_depth.get(doc, position + 1):
                first_depth[doc] = position

    max_depth = max(len(ranked) for ranked in run_lists)
    depth = 0
    members = set(base)
    exhausted = False
    if len(members) < k:
        by_depth: dict[int, list[str]] = {}
        for doc, d in first_depth.items():
            by_depth.setdefault(d, []).append(doc)
        while len(members) < k and depth < max_depth:
            depth += 1
            members.update(by_depth.get(depth, ()))
        if len(members) < k:
            exhausted = True
        # Never report a deeper pool than the last depth that added a doc.
        depth = max((first_depth[doc] for doc in members if doc not in base), default=0)

    entries = [PoolEntry(doc_id=doc, provenance=prov) for doc, prov in base.items()]
    entries.extend(
        PoolEntry(doc_id=doc, provenance=PROVENANCE_POOLED, first_depth=first_depth[doc])
        for doc in members
        if doc not in base
    )
    entries.sort(key=lambda entry: entry.doc_id)

    order = sorted(members)
    random.Random(f"{seed}/{topic_id}/order").shuffle(order)

    return Pool(
        topic_id=topic_id,
        k=k,
        depth=depth,
        entries=tuple(entries),
        presentation_order=tuple(order),
        exhausted=exhausted,
        k_google=k_google,
        k_noise=k_noise,
        seed=seed,
    )


def build_pools(
    topic_ids: Sequence[str],
    pooling_runs: Sequence[RankedRun],
    google_top: Mapping[str, Sequence[str]],
    noise_docs: Sequence[str],
    *,
    k: int,
    k_google: int,
    k_noise: int,
    seed: int,
) -> list[Pool]:
    """Build one pool per topic from a shared noise-candidate list.

    Topics missing from google_top get no search-seeded docs rather than
    an error, so partial inputs still pool.
    """
    return [
        build_pool(
            topic_id,
            pooling_runs,
            google_top.get(topic_id, ()),
            noise_docs,
            k=k,
            k_google=k_google,
            k_noise=k_noise,
            seed=seed,
        )
        for topic_id in topic_ids
    ]


@dataclass(frozen=True)
class OverlapReport:
    """How often pooled documents recur across topics.

    The identity sum_of_pool_sizes = unique_docs + sum((m-1) * count(m))
    holds by construction.
    """

    histogram: Mapping[int, int]
    sum_of_pool_sizes: int
    unique_docs: int


def overlap_report(pools: Sequence[Pool]) -> OverlapReport:
    multiplicity: dict[str, int] = {}
    for pool in pools:
        for doc in pool.doc_ids():
            multiplicity[doc] = multiplicity.get(doc, 0) + 1
    histogram: dict[int, int] = {}
    for count in multiplicity.values():
        histogram[count] = histogram.get(count, 0) + 1
    return OverlapReport(
        histogram=dict(sorted(histogram.items())),
        sum_of_pool_sizes=sum(pool.size for pool in pools),
        unique_docs=len(multiplicity),
    )


def biased_collection(
    pools: Sequence[Pool], manifest: Iterable[ManifestEntry]
) -> set[str]:
    """Union of all pool members, validated against the manifest."""
    known = {entry.doc_id for entry in manifest}
    members = set()
    for pool in pools:
        members.update(pool.doc_ids())
    dangling = sorted(members - known)
    if dangling:
        raise ValueError(
            f"{len(dangling)} pooled doc(s) missing from the manifest, "
            f"e.g. {dangling[:5]}"
        )
    return members


def check_pool_references(
    pools: Sequence[Pool], known_doc_ids: Iterable[str]
) -> list[str]:
    """Diagnostics for pool members that do not resolve against the manifest."""
    known = set(known_doc_ids)
    return [
        f"pool {pool.topic_id} references unknown doc {doc_id!r}"
        for pool in pools
        for doc_id in sorted(pool.doc_ids() - known)
    ]


# --- pool manifest files ---
#
# One header comment per topic, then its entries in presentation order:
#   # pool topic=T k=100 k_google=10 k_noise=10 seed=42 depth=29 exhausted=false
#   T<TAB>doc<TAB>provenance<TAB>first_depth|-


def write_pools(pools: Sequence[Pool]) -> str:
    lines = []
    for pool in sorted(pools, key=lambda p: p.topic_id):
        lines.append(
            f"# pool topic={pool.topic_id} k={pool.k} k_google={pool.k_google} "
            f"k_noise={pool.k_noise} seed={pool.seed} depth={pool.depth} "
            f"exhausted={'true' if pool.exhausted else 'false'}"
        )
        by_id = {entry.doc_id: entry for entry in pool.entries}
        for doc_id in pool.presentation_order:
            entry = by_id[doc_id]
            depth_field = "-" if entry.first_depth is None else str(entry.first_depth)
            lines.append(
                f"{pool.topic_id}\t{entry.doc_id}\t{entry.provenance}\t{depth_field}"
            )
    return "\n".join(lines) + ("\n" if lines else "")


def parse_pools(text: str) -> list[Pool]:
    pools: list[Pool] = []
    header: dict[str, str] | None = None
    entries: list[PoolEntry] = []
    order: list[str] = []

    def flush():
        nonlocal header, entries, order
        if header is None:
            return
        pools.append(
            Pool(
                topic_id=header["topic"],
                k=int(header["k"]),
                depth=int(header["depth"]),
                entries=tuple(sorted(entries, key=lambda e: e.doc_id)),
                presentation_order=tuple(order),
                exhausted=header["exhausted"] == "true",
                k_google=int(header["k_google"]),
                k_noise=int(header["k_noise"]),
                seed=int(header["seed"]),
            )
        )
        header, entries, order = None, [], []

    for lineno, raw in enumerate(text.splitlines(), 1):
        if not raw.strip():
            continue
        if raw.startswith("#"):
            body = raw.lstrip("#").strip()
            if not body.startswith("pool "):
                continue
            flush()
            try:
                header = dict(part.split("=", 1) for part in body.split()[1:])
                for key in ("topic", "k", "k_google", "k_noise", "seed", "depth", "exhausted"):
                    if key not in header:
                        raise KeyError(key)
            except (KeyError, ValueError) as exc:
                raise ParseError(f"bad pool header: {exc}", line=lineno) from None
            continue
        fields = raw.split("\t")
        if len(fields) != 4:
            raise ParseError(
                f"expected 4 tab-separated fields, got {len(fields)}", line=lineno
            )
        topic_id, doc_id, provenance, depth_field = fields
        if header is None or topic_id != header["topic"]:
            raise ParseError(
                f"entry for topic {topic_id!r} outside its pool header", line=lineno
            )
        first_depth = None if depth_field == "-" else int(depth_field)
        entries.append(
            PoolEntry(doc_id=doc_id, provenance=provenance, first_depth=first_depth)
        )
        order.append(doc_id)
    flush()
    return pools
