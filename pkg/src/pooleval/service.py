"""HTTP judging service.

Serves each assessor their assigned topics, pool documents in the
stored presentation order, and cleaned document bodies; records grades
to the append-only event log; exports qrels. Assessors authenticate
with a bearer token mapped to an assessor id in the assignments file.

No response ever includes where a document came from (search seeding,
noise injection, or pooling); assessors must judge blind.
"""

from __future__ import annotations

import json
import logging
import socket
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse, Response

from .cleaning import clean_document
from .formats import parse_manifest, parse_topics, write_qrels
from .judging import EventLog, JudgmentEvent, export_qrels, export_qrels_by_assessor, utc_now_iso
from .model import GRADES, Topic
from .pooling import Pool, parse_pools

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Assignment:
    assessor_id: str
    token: str
    topic_ids: tuple[str, ...]

    def __post_init__(self):
        if not self.assessor_id or not self.token:
            raise ValueError("assessor_id and token must be non-empty")
        if not self.topic_ids:
            raise ValueError(f"assessor {self.assessor_id}: no topics assigned")


def parse_assignments(text: str) -> tuple[Assignment, ...]:
    """Assignments file: {"assessors": [{assessor_id, token, topics}]}."""
    try:
        payload = json.loads(text)
        rows = payload["assessors"]
    except (json.JSONDecodeError, TypeError, KeyError) as exc:
        raise ValueError(f"bad assignments file: {exc}") from None
    assignments = tuple(
        Assignment(
            assessor_id=row["assessor_id"],
            token=row["token"],
            topic_ids=tuple(row["topics"]),
        )
        for row in rows
    )
    ids = [a.assessor_id for a in assignments]
    if len(ids) != len(set(ids)):
        raise ValueError("duplicate assessor_id in assignments")
    tokens = [a.token for a in assignments]
    if len(tokens) != len(set(tokens)):
        raise ValueError("duplicate token in assignments")
    return assignments


@dataclass(frozen=True)
class ServiceConfig:
    """Paths and bind address for the judging service.

    Relative paths in the config file resolve against its directory.
    The log file need not exist yet; everything else must.
    """

    docs_root: Path
    manifest: Path
    pools: Path
    assignments: Path
    log: Path
    topics: Path | None = None
    ui_dir: Path | None = None
    host: str = "127.0.0.1"
    port: int = 8765


def load_config(path: str | Path) -> ServiceConfig:
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ValueError(f"cannot read config {path}: {exc}") from None
    base = path.parent

    def resolve(key: str, required: bool = True) -> Path | None:
        value = payload.get(key)
        if value is None:
            if required:
                raise ValueError(f"config is missing {key!r}")
            return None
        return (base / value).resolve()

    config = ServiceConfig(
        docs_root=resolve("docs_root"),
        manifest=resolve("manifest"),
        pools=resolve("pools"),
        assignments=resolve("assignments"),
        log=resolve("log"),
        topics=resolve("topics", required=False),
        ui_dir=resolve("ui_dir", required=False),
        host=payload.get("host", "127.0.0.1"),
        port=int(payload.get("port", 8765)),
    )
    for name in ("docs_root", "manifest", "pools", "assignments"):
        target = getattr(config, name)
        if not target.exists():
            raise ValueError(f"config {name} does not exist: {target}")
    if config.topics is not None and not config.topics.exists():
        raise ValueError(f"config topics does not exist: {config.topics}")
    if config.ui_dir is not None and not config.ui_dir.is_dir():
        raise ValueError(f"config ui_dir is not a directory: {config.ui_dir}")
    return config


class _State:
    """Loaded collection data plus the live event log."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        pools = parse_pools(config.pools.read_text(encoding="utf-8"))
        self.pools: dict[str, Pool] = {pool.topic_id: pool for pool in pools}
        entries = parse_manifest(config.manifest.read_text(encoding="utf-8"))
        self.doc_paths: dict[str, Path] = {
            entry.doc_id: (config.docs_root / entry.path) for entry in entries
        }
        self.assignments = parse_assignments(
            config.assignments.read_text(encoding="utf-8")
        )
        self.by_token: dict[str, Assignment] = {a.token: a for a in self.assignments}
        self.topics: dict[str, Topic] = {}
        if config.topics is not None:
            parsed = parse_topics(config.topics.read_text(encoding="utf-8"))
            self.topics = {topic.id: topic for topic in parsed}
        self.log = EventLog(config.log)
        self._clean_cache: dict[str, str] = {}

        missing = [
            topic_id
            for assignment in self.assignments
            for topic_id in assignment.topic_ids
            if topic_id not in self.pools
        ]
        if missing:
            raise ValueError(
                f"assigned topic(s) have no pool: {sorted(set(missing))}"
            )

    def assessor_for(self, request: Request) -> Assignment | None:
        header = request.headers.get("authorization", "")
        if not header.lower().startswith("bearer "):
            return None
        return self.by_token.get(header[7:].strip())

    def doc_topics(self, doc_id: str) -> set[str]:
        return {
            topic_id
            for topic_id, pool in self.pools.items()
            if doc_id in pool.doc_ids()
        }

    def cleaned(self, doc_id: str) -> str:
        if doc_id not in self._clean_cache:
            raw = self.doc_paths[doc_id].read_bytes()
            self._clean_cache[doc_id] = clean_document(raw)
        return self._clean_cache[doc_id]

    def assessor_grades(self, assessor_id: str) -> dict[tuple[str, str], int]:
        grades: dict[tuple[str, str], int] = {}
        for event in self.log.events():
            if event.assessor_id == assessor_id:
                grades[(event.topic_id, event.doc_id)] = event.grade
        return grades


def _error(status: int, detail: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"detail": detail})


def create_app(config: ServiceConfig) -> FastAPI:
    state = _State(config)
    app = FastAPI(title="judging service", docs_url=None, redoc_url=None, openapi_url=None)
    app.state.pooleval = state

    @app.get("/api/topics")
    def list_topics(request: Request):
        assessor = state.assessor_for(request)
        if assessor is None:
            return _error(401, "missing or unknown bearer token")
        grades = state.assessor_grades(assessor.assessor_id)
        rows = []
        for topic_id in assessor.topic_ids:
            pool = state.pools[topic_id]
            judged = sum(1 for (t, _d) in grades if t == topic_id)
            topic = state.topics.get(topic_id)
            rows.append(
                {
                    "topic_id": topic_id,
                    "title": topic.title if topic else "",
                    "levels": dict(topic.levels) if topic else {},
                    "judged": judged,
                    "total": pool.size,
                }
            )
        return {"assessor_id": assessor.assessor_id, "topics": rows}

    @app.get("/api/pools/{topic_id}")
    def get_pool(topic_id: str, request: Request):
        assessor = state.assessor_for(request)
        if assessor is None:
            return _error(401, "missing or unknown bearer token")
        pool = state.pools.get(topic_id)
        if pool is None:
            return _error(404, f"unknown topic {topic_id}")
        if topic_id not in assessor.topic_ids:
            return _error(403, f"topic {topic_id} is not assigned to you")
        grades = state.assessor_grades(assessor.assessor_id)
        return {
            "topic_id": topic_id,
            "doc_ids": list(pool.presentation_order),
            "grades": {
                doc_id: grade
                for (t, doc_id), grade in grades.items()
                if t == topic_id
            },
        }

    @app.get("/api/docs/{doc_id}/clean")
    def get_doc(doc_id: str, request: Request):
        assessor = state.assessor_for(request)
        if assessor is None:
            return _error(401, "missing or unknown bearer token")
        if doc_id not in state.doc_paths:
            return _error(404, f"unknown doc {doc_id}")
        holding = state.doc_topics(doc_id)
        if not holding & set(assessor.topic_ids):
            return _error(403, f"doc {doc_id} is not in any of your pools")
        try:
            html = state.cleaned(doc_id)
        except OSError as exc:
            logger.error("cannot read doc %s: %s", doc_id, exc)
            return _error(404, f"doc {doc_id} content unavailable")
        return Response(content=html, media_type="text/html; charset=utf-8")

    @app.post("/api/judgments")
    async def record_judgment(request: Request):
        assessor = state.assessor_for(request)
        if assessor is None:
            return _error(401, "missing or unknown bearer token")
        try:
            payload = await request.json()
        except json.JSONDecodeError:
            return _error(422, "body must be JSON")
        if not isinstance(payload, dict):
            return _error(422, "body must be a JSON object")
        topic_id = payload.get("topic_id")
        doc_id = payload.get("doc_id")
        grade = payload.get("grade")
        if not isinstance(topic_id, str) or not isinstance(doc_id, str):
            return _error(422, "topic_id and doc_id must be strings")
        if not isinstance(grade, int) or isinstance(grade, bool) or grade not in GRADES:
            return _error(422, f"grade must be one of {list(GRADES)}")
        pool = state.pools.get(topic_id)
        if pool is None:
            return _error(404, f"unknown topic {topic_id}")
        if topic_id not in assessor.topic_ids:
            return _error(403, f"topic {topic_id} is not assigned to you")
        if doc_id not in pool.doc_ids():
            if doc_id not in state.doc_paths:
                return _error(404, f"unknown doc {doc_id}")
            return _error(403, f"doc {doc_id} is not in the pool of {topic_id}")
        event = JudgmentEvent(
            assessor_id=assessor.assessor_id,
            topic_id=topic_id,
            doc_id=doc_id,
            grade=grade,
            timestamp=utc_now_iso(),
        )
        state.log.append(event)
        grades = state.assessor_grades(assessor.assessor_id)
        judged = sum(1 for (t, _d) in grades if t == topic_id)
        return {
            "ok": True,
            "topic_id": topic_id,
            "doc_id": doc_id,
            "grade": grade,
            "judged": judged,
            "total": pool.size,
        }

    @app.get("/api/export/qrels")
    def export(request: Request, assessor: str | None = None):
        caller = state.assessor_for(request)
        if caller is None:
            return _error(401, "missing or unknown bearer token")
        events = state.log.events()
        if assessor is None:
            qrels = export_qrels(events)
        else:
            per_assessor = export_qrels_by_assessor(events)
            if assessor not in per_assessor:
                return _error(404, f"no judgments by assessor {assessor}")
            qrels = per_assessor[assessor]
        return PlainTextResponse(write_qrels(qrels))

    if config.ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=config.ui_dir, html=True), name="ui")

    return app


def serve(config: ServiceConfig, *, port: int | None = None) -> None:
    """Run the service, printing the bound address once it is known.

    Port 0 binds an ephemeral port, so scripted clients can parse the
    printed address instead of guessing.
    """
    import uvicorn

    app = create_app(config)
    bind_port = config.port if port is None else port
    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    sock.bind((config.host, bind_port))
    actual = sock.getsockname()[1]
    print(f"serving on http://{config.host}:{actual}", flush=True)
    server = uvicorn.Server(
        uvicorn.Config(app, host=config.host, port=actual, log_level="warning")
    )
    server.run(sockets=[sock])


__all__ = [
    "Assignment",
    "parse_assignments",
    "ServiceConfig",
    "load_config",
    "create_app",
    "serve",
]
