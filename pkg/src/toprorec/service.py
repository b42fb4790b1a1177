"""HTTP JSON API around an immutable engine snapshot.

Request handlers read the snapshot once and never mutate it, so the
whole API is safe under concurrent load; an admin reload builds a new
snapshot off to the side and swaps it in atomically. Sessions are
in-memory only and expire after a TTL; nothing user-related is persisted.
"""

from __future__ import annotations

import secrets
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping

from fastapi import FastAPI, Header, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .catalog import CatalogError, load_catalog
from .cleaning import CleaningConfig
from .matrix import MatrixError, TopicProgramMatrix, matrix_from_csv
from .matrix import build_topic_program_matrix, case_study_program_names
from .recommend import RecommendError, recommend, topic_scores
from .snapshot import build_snapshot
from .topics import InterestTopic, TopicError, import_topics

DEFAULT_PHI = 8
DEFAULT_TAU = 7
DEFAULT_SESSION_TTL = 30 * 60.0


@dataclass(frozen=True)
class EngineSnapshot:
    """Everything a request needs, immutable once constructed."""

    matrix: TopicProgramMatrix
    topics: tuple[InterestTopic, ...] | None = None
    program_names: Mapping[str, str] = field(default_factory=dict)

    @classmethod
    def from_catalog_files(
        cls,
        catalog_path: str | Path,
        topics_path: str | Path,
        cleaning: CleaningConfig | None = None,
    ) -> "EngineSnapshot":
        catalog = load_catalog(catalog_path, cleaning=cleaning)
        topics = tuple(import_topics(topics_path))
        snapshot = build_snapshot(catalog)
        matrix = build_topic_program_matrix(catalog, snapshot.knowledge_map, topics)
        names = {p.id: p.name for p in catalog.programs}
        return cls(matrix=matrix, topics=topics, program_names=names)

    @classmethod
    def from_matrix_file(
        cls,
        matrix_path: str | Path,
        topics_path: str | Path | None = None,
        names: Mapping[str, str] | None = None,
    ) -> "EngineSnapshot":
        matrix = matrix_from_csv(matrix_path)
        topics = tuple(import_topics(topics_path)) if topics_path else None
        return cls(matrix=matrix, topics=topics, program_names=dict(names or {}))


@dataclass
class Session:
    session_id: str
    created: float
    touched: float
    selection: tuple[int, ...] = ()
    recommended: tuple[str, ...] = ()


class SessionStore:
    """In-memory sessions with TTL expiry; no user data leaves the process."""

    def __init__(self, ttl: float = DEFAULT_SESSION_TTL, clock: Callable[[], float] = time.monotonic):
        self._ttl = ttl
        self._clock = clock
        self._lock = threading.Lock()
        self._sessions: dict[str, Session] = {}

    def _purge(self, now: float) -> None:
        dead = [k for k, s in self._sessions.items() if now - s.touched > self._ttl]
        for k in dead:
            del self._sessions[k]

    def touch(
        self,
        session_id: str | None,
        selection: tuple[int, ...],
        recommended: tuple[str, ...],
    ) -> str:
        now = self._clock()
        with self._lock:
            self._purge(now)
            session = self._sessions.get(session_id) if session_id else None
            if session is None:
                sid = session_id or secrets.token_urlsafe(16)
                session = Session(session_id=sid, created=now, touched=now)
                self._sessions[sid] = session
            session.touched = now
            session.selection = selection
            session.recommended = recommended
            return session.session_id

    def get(self, session_id: str) -> Session | None:
        now = self._clock()
        with self._lock:
            self._purge(now)
            return self._sessions.get(session_id)

    def __len__(self) -> int:
        with self._lock:
            return len(self._sessions)


class RecommendRequest(BaseModel):
    topic_ids: list[int]
    session_id: str | None = None


class ExplainRequest(BaseModel):
    topic_ids: list[int]
    programs: list[str]


class ReloadRequest(BaseModel):
    catalog_path: str | None = None
    topics_path: str | None = None
    matrix_path: str | None = None
    use_case_study_names: bool = False


def create_app(
    engine: EngineSnapshot | None = None,
    phi: int = DEFAULT_PHI,
    tau: int = DEFAULT_TAU,
    admin_token: str | None = None,
    session_ttl: float = DEFAULT_SESSION_TTL,
    ui_dir: str | Path | None = None,
    clock: Callable[[], float] = time.monotonic,
) -> FastAPI:
    app = FastAPI(title="toprorec", version="0.1.0")
    app.state.engine = engine
    app.state.phi = phi
    app.state.tau = tau
    app.state.sessions = SessionStore(ttl=session_ttl, clock=clock)

    def current_engine() -> EngineSnapshot:
        snapshot: EngineSnapshot | None = app.state.engine
        if snapshot is None:
            raise HTTPException(status_code=503, detail="engine not loaded")
        return snapshot

    @app.get("/api/topics")
    def get_topics() -> dict:
        snapshot = current_engine()
        if snapshot.topics is None:
            raise HTTPException(status_code=503, detail="no topics loaded")
        gamma = max(len(t.keywords) for t in snapshot.topics)
        return {
            "h": len(snapshot.topics),
            "gamma": gamma,
            "topics": [
                {
                    "id": t.id,
                    "keywords": [{"w": w, "score": s} for w, s in t.keywords],
                }
                for t in snapshot.topics
            ],
            "phi": app.state.phi,
            "tau": app.state.tau,
        }

    @app.post("/api/recommend")
    def post_recommend(body: RecommendRequest) -> dict:
        snapshot = current_engine()
        try:
            rec = recommend(body.topic_ids, snapshot.matrix, app.state.tau, phi=app.state.phi)
        except RecommendError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        doc = rec.to_json_dict()
        for entry in doc["entries"]:
            entry["name"] = snapshot.program_names.get(entry["program"], entry["program"])
        if rec.entries:
            table = topic_scores(rec.selection, snapshot.matrix, rec.program_ids())
            doc["topic_scores"] = table.to_json_dict()
        else:
            doc["topic_scores"] = None
        doc["session_id"] = app.state.sessions.touch(
            body.session_id, rec.selection, rec.program_ids()
        )
        return doc

    @app.post("/api/explain")
    def post_explain(body: ExplainRequest) -> dict:
        snapshot = current_engine()
        try:
            table = topic_scores(body.topic_ids, snapshot.matrix, body.programs)
        except RecommendError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        doc = table.to_json_dict()
        doc["names"] = {
            p: snapshot.program_names.get(p, p) for p in table.programs
        }
        return doc

    @app.post("/api/admin/reload")
    def post_reload(
        body: ReloadRequest,
        x_admin_token: str | None = Header(default=None),
    ) -> dict:
        if admin_token is None or x_admin_token != admin_token:
            raise HTTPException(status_code=401, detail="admin token required")
        try:
            if body.matrix_path:
                names = case_study_program_names() if body.use_case_study_names else None
                new_engine = EngineSnapshot.from_matrix_file(
                    body.matrix_path, body.topics_path, names
                )
            elif body.catalog_path and body.topics_path:
                new_engine = EngineSnapshot.from_catalog_files(
                    body.catalog_path, body.topics_path
                )
            else:
                raise HTTPException(
                    status_code=422,
                    detail="need matrix_path or catalog_path+topics_path",
                )
        except (CatalogError, TopicError, MatrixError, OSError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        app.state.engine = new_engine  # atomic swap; in-flight requests keep the old one
        return {
            "status": "ok",
            "programs": new_engine.matrix.n,
            "topics": new_engine.matrix.h,
        }

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
