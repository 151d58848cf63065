"""Judging service endpoints: auth, blind pools, grading, and export."""

import json
import re

import pytest
from fastapi.testclient import TestClient

from pooleval.cleaning import clean_document
from pooleval.formats import parse_qrels
from pooleval.service import (
    ServiceConfig,
    create_app,
    load_config,
    parse_assignments,
)
from pooleval.synthetic import materialize

AUTH_A = {"Authorization": "Bearer token-a"}
AUTH_B = {"Authorization": "Bearer token-b"}

# Field names that would reveal where a pooled document came from.
FORBIDDEN_KEYS = {"provenance", "first_depth", "google", "noise", "pooled"}


@pytest.fixture(scope="session")
def corpus(small_collection, tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    paths = materialize(small_collection, root)
    return {"root": root, "paths": paths, "collection": small_collection}


@pytest.fixture
def service(corpus, tmp_path):
    root = corpus["root"]
    config = ServiceConfig(
        docs_root=root / "docs",
        manifest=root / "manifest.tsv",
        pools=root / "pools.tsv",
        assignments=root / "assignments.json",
        log=tmp_path / "judgments.jsonl",
        topics=root / "topics.xml",
    )
    app = create_app(config)
    return {"client": TestClient(app), "config": config, "corpus": corpus}


def pool_of(corpus, topic_id):
    for pool in corpus["collection"].pools:
        if pool.topic_id == topic_id:
            return pool
    raise KeyError(topic_id)


def collect_keys(payload, found):
    if isinstance(payload, dict):
        for key, value in payload.items():
            found.add(key)
            collect_keys(value, found)
    elif isinstance(payload, list):
        for value in payload:
            collect_keys(value, found)


class TestParseAssignments:
    def test_parses_assessors(self):
        text = json.dumps(
            {
                "assessors": [
                    {"assessor_id": "a", "token": "ta", "topics": ["2011-001"]},
                    {"assessor_id": "b", "token": "tb", "topics": ["2011-002"]},
                ]
            }
        )
        assignments = parse_assignments(text)
        assert [a.assessor_id for a in assignments] == ["a", "b"]
        assert assignments[0].topic_ids == ("2011-001",)

    def test_duplicate_ids_rejected(self):
        text = json.dumps(
            {
                "assessors": [
                    {"assessor_id": "a", "token": "t1", "topics": ["2011-001"]},
                    {"assessor_id": "a", "token": "t2", "topics": ["2011-002"]},
                ]
            }
        )
        with pytest.raises(ValueError):
            parse_assignments(text)

    def test_duplicate_tokens_rejected(self):
        text = json.dumps(
            {
                "assessors": [
                    {"assessor_id": "a", "token": "t", "topics": ["2011-001"]},
                    {"assessor_id": "b", "token": "t", "topics": ["2011-002"]},
                ]
            }
        )
        with pytest.raises(ValueError):
            parse_assignments(text)

    def test_empty_topics_rejected(self):
        text = json.dumps(
            {"assessors": [{"assessor_id": "a", "token": "t", "topics": []}]}
        )
        with pytest.raises(ValueError):
            parse_assignments(text)

    def test_bad_json_rejected(self):
        with pytest.raises(ValueError):
            parse_assignments("not json")
        with pytest.raises(ValueError):
            parse_assignments("{}")


class TestLoadConfig:
    def test_resolves_relative_paths(self, corpus):
        config = load_config(corpus["paths"]["config"])
        assert config.docs_root == (corpus["root"] / "docs").resolve()
        assert config.manifest.name == "manifest.tsv"
        assert config.topics is not None
        assert config.host == "127.0.0.1"
        assert config.port == 8765

    def test_log_need_not_exist(self, corpus):
        config = load_config(corpus["paths"]["config"])
        assert not config.log.exists()

    def test_missing_key_rejected(self, tmp_path):
        target = tmp_path / "config.json"
        target.write_text(json.dumps({"docs_root": "docs"}))
        with pytest.raises(ValueError, match="missing"):
            load_config(target)

    def test_dangling_path_rejected(self, corpus, tmp_path):
        payload = json.loads(corpus["paths"]["config"].read_text())
        target = tmp_path / "config.json"
        target.write_text(json.dumps(payload))
        with pytest.raises(ValueError, match="does not exist"):
            load_config(target)

    def test_assigned_topic_without_pool_rejected(self, corpus, tmp_path):
        root = corpus["root"]
        bad = tmp_path / "assignments.json"
        bad.write_text(
            json.dumps(
                {
                    "assessors": [
                        {
                            "assessor_id": "a",
                            "token": "t",
                            "topics": ["2011-777"],
                        }
                    ]
                }
            )
        )
        config = ServiceConfig(
            docs_root=root / "docs",
            manifest=root / "manifest.tsv",
            pools=root / "pools.tsv",
            assignments=bad,
            log=tmp_path / "log.jsonl",
        )
        with pytest.raises(ValueError, match="no pool"):
            create_app(config)


class TestAuth:
    def test_every_endpoint_requires_a_token(self, service):
        client = service["client"]
        assert client.get("/api/topics").status_code == 401
        assert client.get("/api/pools/2011-001").status_code == 401
        assert client.get("/api/docs/d00000/clean").status_code == 401
        assert client.post("/api/judgments", json={}).status_code == 401
        assert client.get("/api/export/qrels").status_code == 401

    def test_unknown_token_rejected(self, service):
        response = service["client"].get(
            "/api/topics", headers={"Authorization": "Bearer nope"}
        )
        assert response.status_code == 401

    def test_non_bearer_scheme_rejected(self, service):
        response = service["client"].get(
            "/api/topics", headers={"Authorization": "Basic dXNlcg=="}
        )
        assert response.status_code == 401


class TestTopics:
    def test_lists_only_assigned_topics(self, service):
        payload = service["client"].get("/api/topics", headers=AUTH_A).json()
        assert payload["assessor_id"] == "assessor-a"
        listed = [row["topic_id"] for row in payload["topics"]]
        assignments = parse_assignments(
            service["config"].assignments.read_text()
        )
        expected = next(
            a for a in assignments if a.assessor_id == "assessor-a"
        ).topic_ids
        assert listed == list(expected)

    def test_rows_carry_title_levels_and_progress(self, service):
        payload = service["client"].get("/api/topics", headers=AUTH_A).json()
        row = payload["topics"][0]
        assert row["title"]
        assert set(row["levels"]) == {"0", "1", "2"}
        assert row["judged"] == 0
        pool = pool_of(service["corpus"], row["topic_id"])
        assert row["total"] == pool.size


class TestPools:
    def test_returns_presentation_order(self, service):
        topic_id = "2011-001"
        payload = (
            service["client"]
            .get(f"/api/pools/{topic_id}", headers=AUTH_A)
            .json()
        )
        pool = pool_of(service["corpus"], topic_id)
        assert payload["doc_ids"] == list(pool.presentation_order)
        assert payload["grades"] == {}

    def test_order_is_stable_across_app_instances(self, service, tmp_path):
        config = service["config"]
        other = create_app(
            ServiceConfig(
                docs_root=config.docs_root,
                manifest=config.manifest,
                pools=config.pools,
                assignments=config.assignments,
                log=tmp_path / "other.jsonl",
                topics=config.topics,
            )
        )
        first = (
            service["client"].get("/api/pools/2011-001", headers=AUTH_A).json()
        )
        second = TestClient(other).get("/api/pools/2011-001", headers=AUTH_A).json()
        assert first["doc_ids"] == second["doc_ids"]

    def test_unknown_topic_is_404(self, service):
        response = service["client"].get("/api/pools/2011-777", headers=AUTH_A)
        assert response.status_code == 404

    def test_unassigned_topic_is_403(self, service):
        other = service["client"].get("/api/topics", headers=AUTH_B).json()
        their_topic = other["topics"][0]["topic_id"]
        response = service["client"].get(
            f"/api/pools/{their_topic}", headers=AUTH_A
        )
        assert response.status_code == 403


class TestDocs:
    def test_serves_cleaned_html(self, service):
        corpus = service["corpus"]
        pool = pool_of(corpus, "2011-001")
        doc_id = pool.presentation_order[0]
        response = service["client"].get(
            f"/api/docs/{doc_id}/clean", headers=AUTH_A
        )
        assert response.status_code == 200
        assert response.headers["content-type"].startswith("text/html")
        assert "<script" not in response.text
        assert "onclick" not in response.text
        expected = clean_document(corpus["collection"].contents[doc_id])
        assert response.text == expected

    def test_unknown_doc_is_404(self, service):
        response = service["client"].get(
            "/api/docs/no-such-doc/clean", headers=AUTH_A
        )
        assert response.status_code == 404

    def test_doc_outside_callers_pools_is_403(self, service):
        corpus = service["corpus"]
        mine = set()
        for topic_id in ("2011-001", "2011-002"):
            mine |= pool_of(corpus, topic_id).doc_ids()
        theirs = pool_of(corpus, "2011-003").doc_ids() - mine
        doc_id = sorted(theirs)[0]
        response = service["client"].get(
            f"/api/docs/{doc_id}/clean", headers=AUTH_A
        )
        assert response.status_code == 403


class TestJudgments:
    def post(self, service, body, headers=AUTH_A):
        return service["client"].post(
            "/api/judgments", headers=headers, json=body
        )

    def test_judgment_is_acknowledged_and_logged(self, service):
        pool = pool_of(service["corpus"], "2011-001")
        doc_id = pool.presentation_order[0]
        response = self.post(
            service, {"topic_id": "2011-001", "doc_id": doc_id, "grade": 2}
        )
        assert response.status_code == 200
        payload = response.json()
        assert payload["ok"] is True
        assert payload["judged"] == 1
        assert payload["total"] == pool.size
        lines = service["config"].log.read_text().splitlines()
        assert len(lines) == 1
        record = json.loads(lines[0])
        assert record["assessor_id"] == "assessor-a"
        assert record["grade"] == 2

    def test_rejudging_updates_without_growing_progress(self, service):
        pool = pool_of(service["corpus"], "2011-001")
        doc_id = pool.presentation_order[0]
        self.post(service, {"topic_id": "2011-001", "doc_id": doc_id, "grade": 2})
        response = self.post(
            service, {"topic_id": "2011-001", "doc_id": doc_id, "grade": 0}
        )
        assert response.json()["judged"] == 1
        grades = (
            service["client"]
            .get("/api/pools/2011-001", headers=AUTH_A)
            .json()["grades"]
        )
        assert grades == {doc_id: 0}
        assert len(service["config"].log.read_text().splitlines()) == 2

    def test_server_assigns_the_timestamp(self, service):
        pool = pool_of(service["corpus"], "2011-001")
        doc_id = pool.presentation_order[0]
        self.post(
            service,
            {
                "topic_id": "2011-001",
                "doc_id": doc_id,
                "grade": 1,
                "timestamp": "1999-01-01T00:00:00.000000Z",
            },
        )
        record = json.loads(service["config"].log.read_text())
        assert record["timestamp"] != "1999-01-01T00:00:00.000000Z"
        assert re.fullmatch(
            r"\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}\.\d{6}Z", record["timestamp"]
        )

    def test_malformed_bodies_are_422(self, service):
        client = service["client"]
        pool = pool_of(service["corpus"], "2011-001")
        doc_id = pool.presentation_order[0]
        bad_bodies = [
            ["not", "an", "object"],
            {"doc_id": doc_id, "grade": 1},
            {"topic_id": "2011-001", "grade": 1},
            {"topic_id": "2011-001", "doc_id": doc_id},
            {"topic_id": "2011-001", "doc_id": doc_id, "grade": "1"},
            {"topic_id": "2011-001", "doc_id": doc_id, "grade": True},
            {"topic_id": "2011-001", "doc_id": doc_id, "grade": 5},
            {"topic_id": 7, "doc_id": doc_id, "grade": 1},
        ]
        for body in bad_bodies:
            assert self.post(service, body).status_code == 422, body
        raw = client.post(
            "/api/judgments",
            headers={**AUTH_A, "Content-Type": "application/json"},
            content=b"{not json",
        )
        assert raw.status_code == 422
        assert not service["config"].log.exists()

    def test_topic_and_doc_errors(self, service):
        corpus = service["corpus"]
        pool_a = pool_of(corpus, "2011-001")
        doc_in_a = pool_a.presentation_order[0]
        # Unknown topic.
        assert (
            self.post(
                service,
                {"topic_id": "2011-777", "doc_id": doc_in_a, "grade": 1},
            ).status_code
            == 404
        )
        # Known topic assigned to someone else.
        assert (
            self.post(
                service,
                {"topic_id": "2011-003", "doc_id": doc_in_a, "grade": 1},
            ).status_code
            == 403
        )
        # Known doc outside this topic's pool.
        other_doc = sorted(
            pool_of(corpus, "2011-002").doc_ids() - pool_a.doc_ids()
        )[0]
        assert (
            self.post(
                service,
                {"topic_id": "2011-001", "doc_id": other_doc, "grade": 1},
            ).status_code
            == 403
        )
        # Completely unknown doc.
        assert (
            self.post(
                service,
                {"topic_id": "2011-001", "doc_id": "no-such-doc", "grade": 1},
            ).status_code
            == 404
        )


class TestExport:
    def judge(self, service, token_headers, topic_id, grade):
        pool = pool_of(service["corpus"], topic_id)
        doc_id = pool.presentation_order[0]
        response = service["client"].post(
            "/api/judgments",
            headers=token_headers,
            json={"topic_id": topic_id, "doc_id": doc_id, "grade": grade},
        )
        assert response.status_code == 200
        return doc_id

    def test_merged_export_covers_all_assessors(self, service):
        doc_a = self.judge(service, AUTH_A, "2011-001", 2)
        doc_b = self.judge(service, AUTH_B, "2011-003", 1)
        text = service["client"].get("/api/export/qrels", headers=AUTH_A).text
        qrels = parse_qrels(text)
        assert dict(qrels.entries) == {
            ("2011-001", doc_a): 2,
            ("2011-003", doc_b): 1,
        }

    def test_per_assessor_export(self, service):
        doc_a = self.judge(service, AUTH_A, "2011-001", 2)
        self.judge(service, AUTH_B, "2011-003", 1)
        text = (
            service["client"]
            .get("/api/export/qrels", params={"assessor": "assessor-a"}, headers=AUTH_B)
            .text
        )
        qrels = parse_qrels(text)
        assert dict(qrels.entries) == {("2011-001", doc_a): 2}

    def test_export_reflects_latest_judgment(self, service):
        pool = pool_of(service["corpus"], "2011-001")
        doc_id = pool.presentation_order[0]
        for grade in (2, 0, 1):
            service["client"].post(
                "/api/judgments",
                headers=AUTH_A,
                json={"topic_id": "2011-001", "doc_id": doc_id, "grade": grade},
            )
        text = service["client"].get("/api/export/qrels", headers=AUTH_A).text
        assert dict(parse_qrels(text).entries) == {("2011-001", doc_id): 1}

    def test_unknown_assessor_is_404(self, service):
        response = service["client"].get(
            "/api/export/qrels", params={"assessor": "ghost"}, headers=AUTH_A
        )
        assert response.status_code == 404

    def test_empty_log_exports_empty_file(self, service):
        response = service["client"].get("/api/export/qrels", headers=AUTH_A)
        assert response.status_code == 200
        assert response.text == ""


class TestBlindness:
    def test_no_json_response_reveals_document_origin(self, service):
        client = service["client"]
        pool = pool_of(service["corpus"], "2011-001")
        doc_id = pool.presentation_order[0]
        responses = [
            client.get("/api/topics", headers=AUTH_A),
            client.get("/api/pools/2011-001", headers=AUTH_A),
            client.post(
                "/api/judgments",
                headers=AUTH_A,
                json={"topic_id": "2011-001", "doc_id": doc_id, "grade": 1},
            ),
        ]
        for response in responses:
            assert response.status_code == 200
            keys = set()
            collect_keys(response.json(), keys)
            assert not keys & FORBIDDEN_KEYS, response.request.url
            body = response.text.lower()
            assert "provenance" not in body
            assert "first_depth" not in body

    def test_pool_manifest_is_not_reachable(self, service):
        response = service["client"].get("/pools.tsv", headers=AUTH_A)
        assert response.status_code == 404


class TestStaticUi:
    def test_ui_mount_serves_files_and_apis_still_work(self, corpus, tmp_path):
        ui_dir = tmp_path / "ui"
        ui_dir.mkdir()
        (ui_dir / "index.html").write_text("<h1>judging</h1>")
        (ui_dir / "app.js").write_text("console.log('ready');")
        root = corpus["root"]
        config = ServiceConfig(
            docs_root=root / "docs",
            manifest=root / "manifest.tsv",
            pools=root / "pools.tsv",
            assignments=root / "assignments.json",
            log=tmp_path / "log.jsonl",
            topics=root / "topics.xml",
            ui_dir=ui_dir,
        )
        client = TestClient(create_app(config))
        index = client.get("/")
        assert index.status_code == 200
        assert "judging" in index.text
        assert client.get("/app.js").status_code == 200
        assert client.get("/api/topics", headers=AUTH_A).status_code == 200
