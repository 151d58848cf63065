import pytest

from pooleval.formats import (
    ManifestEntry,
    ParseError,
    RunFormatWarning,
    parse_manifest,
    parse_qrels,
    parse_run,
    parse_topics,
    source_topics_map,
    write_manifest,
    write_qrels,
    write_run,
    write_topics,
)
from pooleval.model import Qrels, RankedRun, Topic

TOPIC_XML = """
<topics>
<topic id="2011-014">
<title>use of gold units</title>
<relevance>
<level value="2">Pages with specific discussion.</level>
<level value="1">Pages that mention the subject.</level>
<level value="0">Anything else.</level>
</relevance>
</topic>
<topic id="2011-901">
<title>decoy subject</title>
</topic>
</topics>
"""


class TestTopics:
    def test_parse(self):
        topics = parse_topics(TOPIC_XML)
        assert [t.id for t in topics] == ["2011-014", "2011-901"]
        assert topics[0].title == "use of gold units"
        assert topics[0].levels[2] == "Pages with specific discussion."
        assert topics[1].is_noise

    def test_single_topic_root(self):
        topics = parse_topics(
            '<topic id="2011-001"><title>t</title><relevance>'
            '<level value="0">a</level><level value="1">b</level>'
            '<level value="2">c</level></relevance></topic>'
        )
        assert len(topics) == 1

    def test_round_trip_fixpoint(self):
        topics = parse_topics(TOPIC_XML)
        written = write_topics(topics)
        assert parse_topics(written) == topics
        assert write_topics(parse_topics(written)) == written

    def test_missing_title(self):
        with pytest.raises(ParseError, match="title"):
            parse_topics('<topic id="2011-001"><relevance/></topic>')

    def test_bad_level_value(self):
        with pytest.raises(ParseError, match="not an integer"):
            parse_topics(
                '<topic id="2011-001"><title>t</title>'
                '<relevance><level value="high">x</level></relevance></topic>'
            )

    def test_duplicate_level(self):
        with pytest.raises(ParseError, match="duplicate level"):
            parse_topics(
                '<topic id="2011-001"><title>t</title><relevance>'
                '<level value="0">a</level><level value="0">b</level>'
                "</relevance></topic>"
            )

    def test_malformed_xml_reports_line(self):
        with pytest.raises(ParseError) as info:
            parse_topics("<topics>\n<topic id='2011-001'>\n</oops>\n</topics>")
        assert info.value.line is not None

    def test_escaping_survives_round_trip(self):
        topic = Topic(
            id="2011-001",
            title='painters & "engravers" <beta>',
            levels={0: "none & nothing", 1: "<some>", 2: 'much "more"'},
        )
        assert parse_topics(write_topics([topic])) == [topic]


RUN_TEXT = """\
2011-001 Q0 doc-b 1 9.5 sysA
2011-001 Q0 doc-a 2 7.25 sysA
2011-002 Q0 doc-c 1 4.0 sysA
"""


class TestRuns:
    def test_parse(self):
        run = parse_run(RUN_TEXT)
        assert run.system_id == "sysA"
        assert run.ranking("2011-001") == ["doc-b", "doc-a"]
        assert run.scored("2011-002") == (("doc-c", 4.0),)

    def test_round_trip_fixpoint(self):
        run = parse_run(RUN_TEXT)
        written = write_run(run)
        assert parse_run(written) == run
        assert write_run(parse_run(written)) == written

    def test_rank_gap_warns_and_reorders(self):
        text = "2011-001 Q0 a 5 1.0 s\n2011-001 Q0 b 2 3.0 s\n"
        with pytest.warns(RunFormatWarning):
            run = parse_run(text)
        assert run.ranking("2011-001") == ["b", "a"]

    def test_mixed_tags_rejected(self):
        text = "2011-001 Q0 a 1 1.0 s1\n2011-001 Q0 b 2 0.5 s2\n"
        with pytest.raises(ParseError, match="tag changed"):
            parse_run(text)

    def test_duplicate_doc_rejected(self):
        text = "2011-001 Q0 a 1 1.0 s\n2011-001 Q0 a 2 0.5 s\n"
        with pytest.raises(ParseError, match="duplicate"):
            parse_run(text)

    def test_bad_rank_reports_line(self):
        with pytest.raises(ParseError) as info:
            parse_run("2011-001 Q0 a one 1.0 s\n")
        assert info.value.line == 1

    def test_wrong_field_count(self):
        with pytest.raises(ParseError, match="6 fields"):
            parse_run("2011-001 Q0 a 1 1.0\n")

    def test_empty_run_rejected(self):
        with pytest.raises(ParseError, match="empty"):
            parse_run("\n\n")


class TestQrels:
    def test_parse_and_round_trip(self):
        text = "2011-001 0 doc-a 2\n2011-001 0 doc-b -1\n2011-002 0 doc-a 0\n"
        qrels = parse_qrels(text)
        assert qrels.entries[("2011-001", "doc-b")] == -1
        written = write_qrels(qrels)
        assert parse_qrels(written) == qrels
        assert write_qrels(parse_qrels(written)) == written

    def test_grade_range(self):
        with pytest.raises(ParseError, match="grade"):
            parse_qrels("2011-001 0 doc-a 3\n")

    def test_duplicate_rejected(self):
        with pytest.raises(ParseError, match="duplicate"):
            parse_qrels("2011-001 0 a 1\n2011-001 0 a 2\n")

    def test_output_sorted(self):
        qrels = Qrels(
            entries={("2011-002", "z"): 1, ("2011-001", "b"): 0, ("2011-001", "a"): 2}
        )
        assert write_qrels(qrels) == "2011-001 0 a 2\n2011-001 0 b 0\n2011-002 0 z 1\n"


class TestManifest:
    TEXT = "d1\tpages/d1.html\t2011-001\nd2\tpages/d2.html\t2011-001,2011-002\n"

    def test_parse_and_round_trip(self):
        entries = parse_manifest(self.TEXT)
        assert entries[1].source_topics == frozenset({"2011-001", "2011-002"})
        written = write_manifest(entries)
        assert parse_manifest(written) == entries
        assert write_manifest(parse_manifest(written)) == written

    def test_duplicate_doc_rejected(self):
        with pytest.raises(ParseError, match="duplicate"):
            parse_manifest("d1\ta\t2011-001\nd1\tb\t2011-002\n")

    def test_empty_topics_rejected(self):
        with pytest.raises(ParseError, match="no source topics"):
            parse_manifest("d1\ta\t\n")

    def test_source_topics_map(self):
        entries = parse_manifest(self.TEXT)
        mapping = source_topics_map(entries)
        assert mapping["d2"] == frozenset({"2011-001", "2011-002"})

    def test_paths_with_spaces_survive(self):
        entry = ManifestEntry(
            doc_id="d1", path="some dir/page one.html", source_topics=frozenset({"t"})
        )
        assert parse_manifest(write_manifest([entry])) == [entry]
