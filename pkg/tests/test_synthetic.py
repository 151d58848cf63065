"""Synthetic collection generator: shapes, determinism, and disk layout."""

import json

import pytest

from pooleval.formats import (
    parse_manifest,
    parse_qrels,
    parse_run,
    parse_topics,
)
from pooleval.pooling import parse_pools, write_pools
from pooleval.service import load_config
from pooleval.synthetic import make_collection, materialize


def tiny(seed=5):
    return make_collection(
        topic_count=3,
        noise_topic_count=1,
        pooling_system_count=3,
        scored_system_count=2,
        docs_per_topic=30,
        highly_relevant=6,
        somewhat_relevant=5,
        distractors_per_topic=6,
        run_depth=30,
        k=15,
        k_google=3,
        k_noise=3,
        seed=seed,
    )


class TestShapes:
    def test_topic_identity_split(self):
        collection = tiny()
        assert collection.real_topic_ids == ("2011-001", "2011-002", "2011-003")
        assert collection.noise_topic_ids == ("2011-901",)
        by_id = {topic.id: topic for topic in collection.topics}
        assert not by_id["2011-001"].is_noise
        assert by_id["2011-901"].is_noise
        assert by_id["2011-901"].levels == {}
        assert by_id["2011-001"].levels.keys() == {0, 1, 2}

    def test_system_counts_and_depths(self):
        collection = tiny()
        assert len(collection.pooling_runs) == 3
        assert len(collection.scored_runs) == 2
        assert {run.system_id for run in collection.pooling_runs} == {
            "pool-01",
            "pool-02",
            "pool-03",
        }
        assert {run.system_id for run in collection.scored_runs} == {
            "sys-01",
            "sys-02",
        }
        for run in collection.pooling_runs + collection.scored_runs:
            for topic_id in run.topics():
                assert topic_id in collection.real_topic_ids
                assert len(run.ranking(topic_id)) <= 30

    def test_one_pool_per_real_topic_of_requested_size(self):
        collection = tiny()
        assert [pool.topic_id for pool in collection.pools] == list(
            collection.real_topic_ids
        )
        for pool in collection.pools:
            assert pool.k == 15
            assert pool.size >= 15 or pool.exhausted

    def test_qrels_cover_exactly_the_pool_members(self):
        collection = tiny()
        for pool in collection.pools:
            judged = {
                doc_id
                for (topic_id, doc_id) in collection.qrels.entries
                if topic_id == pool.topic_id
            }
            assert judged == pool.doc_ids()
        assert set(collection.qrels.topics()) == set(collection.real_topic_ids)

    def test_noise_candidates_come_from_noise_topics(self):
        collection = tiny()
        noise_docs = set()
        for topic_id in collection.noise_topic_ids:
            noise_docs |= set(collection.docs_by_topic[topic_id])
        assert set(collection.noise_candidates) <= noise_docs
        real_docs = set()
        for topic_id in collection.real_topic_ids:
            real_docs |= set(collection.docs_by_topic[topic_id])
        assert not set(collection.noise_candidates) & real_docs

    def test_every_doc_has_content(self):
        collection = tiny()
        for entry in collection.manifest_entries():
            assert entry.doc_id in collection.contents
            body = collection.contents[entry.doc_id]
            assert isinstance(body, bytes)
            assert b"<" in body

    def test_crawled_docs_mirror_doc_assignment(self):
        collection = tiny()
        crawled = collection.crawled_docs()
        assert set(crawled) == set(collection.docs_by_topic)
        assert crawled["2011-001"] == collection.docs_by_topic["2011-001"]

    def test_google_rankings_exist_per_real_topic(self):
        collection = tiny()
        assert set(collection.google_top) == set(collection.real_topic_ids)
        for topic_id, docs in collection.google_top.items():
            assert len(docs) >= collection.k_google
            assert len(set(docs)) == len(docs)

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            tiny_bad = make_collection(topic_count=0)
            del tiny_bad
        with pytest.raises(ValueError):
            make_collection(
                topic_count=2,
                docs_per_topic=10,
                highly_relevant=8,
                somewhat_relevant=8,
            )


class TestDeterminism:
    def test_same_seed_reproduces_byte_identical_outputs(self):
        first = tiny(seed=9)
        second = tiny(seed=9)
        assert first.qrels.entries == second.qrels.entries
        assert write_pools(first.pools) == write_pools(second.pools)
        for run_a, run_b in zip(first.scored_runs, second.scored_runs):
            assert run_a == run_b
        assert first.contents == second.contents
        assert first.google_top == second.google_top

    def test_different_seed_changes_the_world(self):
        first = tiny(seed=1)
        second = tiny(seed=2)
        assert (
            first.qrels.entries != second.qrels.entries
            or write_pools(first.pools) != write_pools(second.pools)
        )


@pytest.fixture(scope="module")
def written(tmp_path_factory):
    collection = tiny()
    root = tmp_path_factory.mktemp("synthetic")
    paths = materialize(collection, root)
    return collection, root, paths


class TestMaterialize:
    def test_layout_on_disk(self, written):
        _, root, paths = written
        for name in ("topics", "manifest", "qrels", "pools", "google"):
            assert paths[name].exists(), name
        assert (root / "runs").is_dir()
        assert (root / "docs").is_dir()
        assert paths["config"].exists()
        assert paths["assignments"].exists()

    def test_files_parse_back_to_the_same_collection(self, written):
        collection, _, paths = written
        topics = parse_topics(paths["topics"].read_text())
        assert {t.id for t in topics} == {t.id for t in collection.topics}
        qrels = parse_qrels(paths["qrels"].read_text())
        assert qrels.entries == collection.qrels.entries
        pools = parse_pools(paths["pools"].read_text())
        assert write_pools(pools) == write_pools(collection.pools)
        manifest = parse_manifest(paths["manifest"].read_text())
        assert {e.doc_id for e in manifest} == set(collection.contents)

    def test_runs_parse_back(self, written):
        collection, root, _ = written
        for run in collection.pooling_runs + collection.scored_runs:
            parsed = parse_run((root / "runs" / f"{run.system_id}.run").read_text())
            assert parsed.system_id == run.system_id
            for topic_id in run.topics():
                assert parsed.ranking(topic_id) == run.ranking(topic_id)

    def test_doc_files_hold_the_content_bytes(self, written):
        collection, root, _ = written
        doc_id = next(iter(sorted(collection.contents)))
        on_disk = (root / "docs" / f"{doc_id}.html").read_bytes()
        assert on_disk == collection.contents[doc_id]

    def test_config_and_assignments_are_servable(self, written):
        collection, _, paths = written
        config = load_config(paths["config"])
        assert config.docs_root.is_dir()
        payload = json.loads(paths["assignments"].read_text())
        topics = [
            topic
            for assessor in payload["assessors"]
            for topic in assessor["topics"]
        ]
        assert sorted(topics) == sorted(collection.real_topic_ids)
