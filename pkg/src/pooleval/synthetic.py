"""Deterministic synthetic collections for tests and demos.

Generates topics, crawled documents with planted relevance, ranked runs
from noisy simulated systems, judging pools, and the judgments an ideal
assessor would produce over the final pools. Everything derives from
one seed, so fixtures are reproducible byte for byte.

Simulated systems score a document as its planted gain plus Gaussian
noise scaled by the system's skill, so better systems rank relevant
docs higher on average and effectiveness spreads across systems.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .formats import (
    ManifestEntry,
    write_manifest,
    write_qrels,
    write_run,
    write_topics,
)
from .model import Qrels, RankedRun, Topic
from .pooling import Pool, build_pools, write_pools

_ADJECTIVES = (
    "coastal", "urban", "alpine", "historic", "solar", "regional", "wooden",
    "arctic", "volcanic", "medieval", "tidal", "nocturnal", "glacial",
    "ceramic", "orbital", "thermal", "granite", "migratory", "botanical",
    "seismic", "lunar", "basalt", "amber", "hydraulic", "nomadic",
)
_NOUNS = (
    "lighthouses", "railways", "orchards", "festivals", "bridges",
    "observatories", "harbors", "aqueducts", "windmills", "archives",
    "glaciers", "meadows", "foundries", "canals", "monasteries",
    "vineyards", "quarries", "estuaries", "colonies", "causeways",
    "reservoirs", "workshops", "expeditions", "settlements", "murals",
)
_FILLER = (
    "survey", "report", "history", "notes", "guide", "records", "analysis",
    "overview", "catalog", "journal", "study", "aspects", "methods",
    "origins", "design", "materials", "maintenance", "restoration",
)


@dataclass(frozen=True)
class SyntheticCollection:
    """Everything a pipeline needs, keyed consistently by topic/doc id."""

    seed: int
    topics: tuple[Topic, ...]
    real_topic_ids: tuple[str, ...]
    noise_topic_ids: tuple[str, ...]
    docs_by_topic: Mapping[str, tuple[str, ...]]
    google_top: Mapping[str, tuple[str, ...]]
    noise_candidates: tuple[str, ...]
    pooling_runs: tuple[RankedRun, ...]
    scored_runs: tuple[RankedRun, ...]
    pools: tuple[Pool, ...]
    qrels: Qrels
    contents: Mapping[str, bytes]
    k: int
    k_google: int
    k_noise: int

    def manifest_entries(self) -> list[ManifestEntry]:
        return [
            ManifestEntry(
                doc_id=doc_id,
                path=f"{doc_id}.html",
                source_topics=frozenset((topic_id,)),
            )
            for topic_id in sorted(self.docs_by_topic)
            for doc_id in self.docs_by_topic[topic_id]
        ]

    def crawled_docs(self) -> dict[str, tuple[str, ...]]:
        return {topic_id: docs for topic_id, docs in self.docs_by_topic.items()}


def _topic_title(rng: random.Random) -> str:
    return (
        f"{rng.choice(_ADJECTIVES)} {rng.choice(_NOUNS)} "
        f"{rng.choice(_FILLER)}"
    )


def _levels(title: str) -> dict[int, str]:
    return {
        0: f"The page says nothing useful about {title}.",
        1: f"The page touches on {title} but is not mainly about it.",
        2: f"The page is clearly about {title}.",
    }


def _broken(seed: int, doc_id: str, rate: float) -> bool:
    return random.Random(f"{seed}/{doc_id}/broken").random() < rate


def _decoy_grade(seed: int, topic_id: str, doc_id: str, p1: float, p2: float) -> int:
    draw = random.Random(f"{seed}/{topic_id}/{doc_id}/grade").random()
    if draw < p2:
        return 2
    if draw < p2 + p1:
        return 1
    return 0


def _page(doc_id: str, title: str, emphasis: int, rng: random.Random) -> bytes:
    """A small page; emphasis repeats the topic phrase so relevant pages
    actually mention their topic."""
    words = [rng.choice(_FILLER) for _ in range(30)]
    lead = " ".join([title] * max(emphasis, 0) + words[:15])
    rest = " ".join(words[15:])
    html = (
        f"<html><head><title>{doc_id}</title>"
        f"<style>p {{ color: #222; }}</style></head>"
        f"<body><h1>{title if emphasis else ' '.join(words[:3])}</h1>"
        f"<p>{lead}</p>"
        f"<script>var tracker = 1;</script>"
        f"<p>{rest}</p></body></html>"
    )
    return html.encode("utf-8")


def make_collection(
    *,
    topic_count: int = 23,
    noise_topic_count: int = 2,
    pooling_system_count: int = 12,
    scored_system_count: int = 15,
    docs_per_topic: int = 240,
    highly_relevant: int = 30,
    somewhat_relevant: int = 20,
    distractors_per_topic: int = 30,
    run_depth: int = 100,
    k: int = 100,
    k_google: int = 10,
    k_noise: int = 10,
    seed: int = 0,
    render_failure_rate: float = 0.006,
    noise_relevant_rates: tuple[float, float] = (0.07, 0.09),
) -> SyntheticCollection:
    """Build a full synthetic collection with pools and pool judgments.

    Judgments cover exactly the members of the size-k pools, the way a
    judging campaign over those pools would, so deeper documents stay
    unjudged and incompleteness effects are real.
    """
    if topic_count < 1 or noise_topic_count < 1:
        raise ValueError("need at least one real and one noise topic")
    if pooling_system_count < 1 or scored_system_count < 1:
        raise ValueError("need at least one pooling and one scored system")
    if highly_relevant + somewhat_relevant > docs_per_topic:
        raise ValueError("more planted relevant docs than docs per topic")
    if k < k_google + k_noise:
        raise ValueError("k must cover the google+noise base")
    if not 0.0 <= render_failure_rate <= 1.0:
        raise ValueError("render_failure_rate must be within [0, 1]")
    master = random.Random(f"{seed}/synthetic")

    real_ids = [f"2011-{i:03d}" for i in range(1, topic_count + 1)]
    noise_ids = [f"2011-{900 + i:03d}" for i in range(1, noise_topic_count + 1)]
    titles: dict[str, str] = {}
    topics: list[Topic] = []
    for topic_id in real_ids:
        title = _topic_title(master)
        while title in titles.values():
            title = _topic_title(master)
        titles[topic_id] = title
        topics.append(Topic(id=topic_id, title=title, levels=_levels(title)))
    for topic_id in noise_ids:
        title = _topic_title(master)
        while title in titles.values():
            title = _topic_title(master)
        titles[topic_id] = title
        topics.append(Topic(id=topic_id, title=title, levels={}, is_noise=True))

    all_topic_ids = real_ids + noise_ids
    total_docs = len(all_topic_ids) * docs_per_topic
    doc_ids = [f"d{i:05d}" for i in range(total_docs)]
    master.shuffle(doc_ids)
    docs_by_topic: dict[str, tuple[str, ...]] = {}
    cursor = 0
    for topic_id in all_topic_ids:
        docs_by_topic[topic_id] = tuple(doc_ids[cursor : cursor + docs_per_topic])
        cursor += docs_per_topic
    noise_candidates = tuple(
        doc_id for topic_id in noise_ids for doc_id in docs_by_topic[topic_id]
    )

    # Planted latent grade for each doc within its own topic.
    latent: dict[tuple[str, str], int] = {}
    for topic_id in real_ids:
        own = list(docs_by_topic[topic_id])
        shuffled = own[:]
        random.Random(f"{seed}/{topic_id}/plant").shuffle(shuffled)
        for position, doc_id in enumerate(shuffled):
            if position < highly_relevant:
                grade = 2
            elif position < highly_relevant + somewhat_relevant:
                grade = 1
            else:
                grade = 0
            latent[(topic_id, doc_id)] = grade

    # Candidate set each system ranks for a topic: the topic's own crawl
    # plus a fixed sample of other topics' docs, which is what makes
    # cross-topic pool overlap possible.
    other_docs: dict[str, list[str]] = {}
    for topic_id in real_ids:
        foreign = [
            doc_id
            for other in real_ids
            if other != topic_id
            for doc_id in docs_by_topic[other]
        ]
        picker = random.Random(f"{seed}/{topic_id}/distractors")
        other_docs[topic_id] = picker.sample(
            foreign, min(distractors_per_topic, len(foreign))
        )

    def gain(topic_id: str, doc_id: str) -> float:
        return float(max(latent.get((topic_id, doc_id), 0), 0))

    def make_run(system_id: str, sigma: float) -> RankedRun:
        rankings: dict[str, tuple[tuple[str, float], ...]] = {}
        for topic_id in real_ids:
            scorer = random.Random(f"{seed}/system/{system_id}/{topic_id}")
            candidates = list(docs_by_topic[topic_id]) + other_docs[topic_id]
            scored = [
                (doc_id, gain(topic_id, doc_id) + scorer.gauss(0.0, sigma))
                for doc_id in candidates
            ]
            scored.sort(key=lambda pair: (-pair[1], pair[0]))
            rankings[topic_id] = tuple(scored[:run_depth])
        return RankedRun(system_id=system_id, rankings=rankings)

    pooling_runs = tuple(
        make_run(f"pool-{i:02d}", sigma=0.6 + 1.4 * (i - 1) / max(pooling_system_count - 1, 1))
        for i in range(1, pooling_system_count + 1)
    )
    scored_runs = tuple(
        make_run(f"sys-{i:02d}", sigma=0.5 + 2.5 * (i - 1) / max(scored_system_count - 1, 1))
        for i in range(1, scored_system_count + 1)
    )

    # The search engine ranks a topic's own docs nearly by true gain.
    google_top: dict[str, tuple[str, ...]] = {}
    for topic_id in real_ids:
        scorer = random.Random(f"{seed}/google/{topic_id}")
        scored = [
            (doc_id, gain(topic_id, doc_id) + scorer.gauss(0.0, 0.4))
            for doc_id in docs_by_topic[topic_id]
        ]
        scored.sort(key=lambda pair: (-pair[1], pair[0]))
        google_top[topic_id] = tuple(doc_id for doc_id, _score in scored[: 2 * k_google])

    pools = build_pools(
        real_ids,
        pooling_runs,
        google_top,
        noise_candidates,
        k=k,
        k_google=k_google,
        k_noise=k_noise,
        seed=seed,
    )

    p1, p2 = noise_relevant_rates
    noise_set = set(noise_candidates)
    entries: dict[tuple[str, str], int] = {}
    for pool in pools:
        topic_id = pool.topic_id
        for doc_id in sorted(pool.doc_ids()):
            if _broken(seed, doc_id, render_failure_rate):
                grade = -1
            elif (topic_id, doc_id) in latent:
                grade = latent[(topic_id, doc_id)]
            elif doc_id in noise_set:
                grade = _decoy_grade(seed, topic_id, doc_id, p1, p2)
            else:
                grade = _decoy_grade(seed, topic_id, doc_id, 0.02, 0.01)
            entries[(topic_id, doc_id)] = grade
    qrels = Qrels(entries=entries)

    contents: dict[str, bytes] = {}
    for topic_id in all_topic_ids:
        for doc_id in docs_by_topic[topic_id]:
            emphasis = latent.get((topic_id, doc_id), 0)
            page_rng = random.Random(f"{seed}/{doc_id}/page")
            contents[doc_id] = _page(doc_id, titles[topic_id], emphasis, page_rng)

    return SyntheticCollection(
        seed=seed,
        topics=tuple(topics),
        real_topic_ids=tuple(real_ids),
        noise_topic_ids=tuple(noise_ids),
        docs_by_topic=docs_by_topic,
        google_top=google_top,
        noise_candidates=noise_candidates,
        pooling_runs=pooling_runs,
        scored_runs=scored_runs,
        pools=tuple(pools),
        qrels=qrels,
        contents=contents,
        k=k,
        k_google=k_google,
        k_noise=k_noise,
    )


def materialize(collection: SyntheticCollection, root: str | Path) -> dict[str, Path]:
    """Write the collection to disk in the toolkit's file formats.

    Returns the paths written, keyed by role. Layout:
    topics.xml, manifest.tsv, qrels.txt, pools.tsv, google.run,
    runs/<system>.run, docs/<doc>.html, assignments.json, config.json.
    """
    root = Path(root)
    docs_dir = root / "docs"
    runs_dir = root / "runs"
    docs_dir.mkdir(parents=True, exist_ok=True)
    runs_dir.mkdir(parents=True, exist_ok=True)

    paths: dict[str, Path] = {}

    def write(name: str, relative: str, text: str) -> Path:
        target = root / relative
        target.write_text(text, encoding="utf-8")
        paths[name] = target
        return target

    write("topics", "topics.xml", write_topics(collection.topics))
    write("manifest", "manifest.tsv", write_manifest(collection.manifest_entries()))
    write("qrels", "qrels.txt", write_qrels(collection.qrels))
    write("pools", "pools.tsv", write_pools(collection.pools))
    google_run = RankedRun(
        system_id="google",
        rankings={
            topic_id: tuple(
                (doc_id, float(len(docs) - i))
                for i, doc_id in enumerate(docs)
            )
            for topic_id, docs in collection.google_top.items()
        },
    )
    write("google", "google.run", write_run(google_run))
    for run in collection.pooling_runs + collection.scored_runs:
        write(f"run:{run.system_id}", f"runs/{run.system_id}.run", write_run(run))
    for doc_id, content in sorted(collection.contents.items()):
        (docs_dir / f"{doc_id}.html").write_bytes(content)
    paths["docs"] = docs_dir

    half = (len(collection.real_topic_ids) + 1) // 2
    assignments = {
        "assessors": [
            {
                "assessor_id": "assessor-a",
                "token": "token-a",
                "topics": list(collection.real_topic_ids[:half]),
            },
            {
                "assessor_id": "assessor-b",
                "token": "token-b",
                "topics": list(collection.real_topic_ids[half:]),
            },
        ]
    }
    write("assignments", "assignments.json", json.dumps(assignments, indent=2) + "\n")
    config = {
        "docs_root": "docs",
        "manifest": "manifest.tsv",
        "pools": "pools.tsv",
        "assignments": "assignments.json",
        "log": "judgments.jsonl",
        "topics": "topics.xml",
        "host": "127.0.0.1",
        "port": 8765,
    }
    write("config", "config.json", json.dumps(config, indent=2) + "\n")
    return paths


__all__ = ["SyntheticCollection", "make_collection", "materialize"]
