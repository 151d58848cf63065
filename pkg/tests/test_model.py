import pytest

from pooleval.model import (
    CollectionStats,
    DocRecord,
    Qrels,
    RankedRun,
    Topic,
    check_qrels_references,
    collection_stats,
    conflate_binary,
    validate_topic_set,
)

LEVELS = {0: "not it", 1: "partly it", 2: "exactly it"}


class TestTopic:
    def test_valid_topic(self):
        topic = Topic(id="2011-014", title="gold units", levels=LEVELS)
        assert topic.id == "2011-014"
        assert not topic.is_noise

    def test_id_pattern_enforced(self):
        for bad in ("2011-1", "11-001", "2011_001", "2011-0014", ""):
            with pytest.raises(ValueError):
                Topic(id=bad, title="t", levels=LEVELS)

    def test_blank_title_rejected(self):
        with pytest.raises(ValueError):
            Topic(id="2011-001", title="   ", levels=LEVELS)

    def test_noise_topic_has_no_levels(self):
        topic = Topic(id="2011-901", title="decoys", is_noise=True)
        assert topic.levels == {}
        with pytest.raises(ValueError):
            Topic(id="2011-901", title="decoys", levels=LEVELS, is_noise=True)

    def test_regular_topic_needs_all_levels(self):
        with pytest.raises(ValueError):
            Topic(id="2011-001", title="t", levels={0: "no", 2: "yes"})
        with pytest.raises(ValueError):
            Topic(id="2011-001", title="t", levels={**LEVELS, 3: "beyond"})

    def test_duplicate_ids_rejected(self):
        topic = Topic(id="2011-001", title="t", levels=LEVELS)
        with pytest.raises(ValueError):
            validate_topic_set([topic, topic])


class TestRankedRun:
    def test_from_scores_orders_by_score(self):
        run = RankedRun.from_scores(
            "sys", {"2011-001": [("a", 0.1), ("b", 0.9), ("c", 0.5)]}
        )
        assert run.ranking("2011-001") == ["b", "c", "a"]

    def test_from_scores_ties_keep_input_order(self):
        run = RankedRun.from_scores(
            "sys", {"2011-001": [("a", 0.5), ("b", 0.5), ("c", 0.5)]}
        )
        assert run.ranking("2011-001") == ["a", "b", "c"]

    def test_duplicate_doc_rejected(self):
        with pytest.raises(ValueError):
            RankedRun(
                system_id="sys",
                rankings={"2011-001": (("a", 1.0), ("a", 0.5))},
            )

    def test_missing_topic_is_empty(self):
        run = RankedRun(system_id="sys", rankings={})
        assert run.ranking("2011-009") == []


class TestQrels:
    def test_grade_range_enforced(self):
        Qrels(entries={("2011-001", "a"): -1})
        with pytest.raises(ValueError):
            Qrels(entries={("2011-001", "a"): 3})

    def test_relevant_docs_threshold(self):
        qrels = Qrels(
            entries={
                ("2011-001", "a"): 2,
                ("2011-001", "b"): 1,
                ("2011-001", "c"): 0,
                ("2011-001", "d"): -1,
            }
        )
        assert qrels.relevant_docs("2011-001") == {"a", "b"}

    def test_conflate_binary(self):
        qrels = Qrels(
            entries={
                ("2011-001", "a"): 2,
                ("2011-001", "b"): 1,
                ("2011-001", "c"): 0,
                ("2011-001", "d"): -1,
            }
        )
        binary = conflate_binary(qrels)
        assert binary.entries == {
            ("2011-001", "a"): 1,
            ("2011-001", "b"): 1,
            ("2011-001", "c"): 0,
            ("2011-001", "d"): 0,
        }
        assert conflate_binary(binary).entries == binary.entries

    def test_check_references(self):
        qrels = Qrels(entries={("2011-001", "a"): 1, ("2011-001", "ghost"): 0})
        problems = check_qrels_references(qrels, {"a"})
        assert len(problems) == 1
        assert "ghost" in problems[0]


class TestCollectionStats:
    def docs(self):
        return [
            DocRecord(
                doc_id="a",
                source_topics=frozenset({"2011-001"}),
                content=b"<p>one two three</p>",
            ),
            DocRecord(
                doc_id="b",
                source_topics=frozenset({"2011-001", "2011-002"}),
                content=b"<p>one two three four five</p>",
            ),
            DocRecord(
                doc_id="c",
                source_topics=frozenset({"2011-002"}),
                content=b"<p>one</p>",
            ),
        ]

    def test_counts_and_bytes(self):
        stats = collection_stats(self.docs())
        assert stats.doc_count == 3
        assert stats.total_bytes == sum(len(d.content) for d in self.docs())

    def test_words_stripped_of_markup(self):
        stats = collection_stats(self.docs())
        # Word counts 3, 5, 1 -> mean 3, lower median 3.
        assert stats.words_per_doc.mean == pytest.approx(3.0)
        assert stats.words_per_doc.median == pytest.approx(3.0)

    def test_multi_topic_doc_counts_for_each(self):
        stats = collection_stats(self.docs())
        assert stats.per_topic_downloads == {"2011-001": 2, "2011-002": 2}

    def test_even_count_uses_lower_median(self):
        docs = self.docs()[:2]
        stats = collection_stats(docs)
        # Word counts 3 and 5: lower middle is 3.
        assert stats.words_per_doc.median == pytest.approx(3.0)

    def test_empty_collection(self):
        stats = collection_stats([])
        assert stats.doc_count == 0
        assert stats.words_per_doc.mean == 0.0

    def test_negative_counts_rejected(self):
        with pytest.raises(ValueError):
            CollectionStats(
                doc_count=-1,
                total_bytes=0,
                words_per_doc=collection_stats([]).words_per_doc,
                bytes_per_doc=collection_stats([]).bytes_per_doc,
                per_topic_downloads={},
            )
