"""HTTP/JSON surface over sessions, retrieval, summaries, and delivery.

The service holds no retrieval logic: every response serializes what the
library modules return.  Sessions are keyed by unguessable tokens, each
protected by its own lock so interleaved requests serialize; all sessions
share one immutable index snapshot taken at session creation.
"""

from __future__ import annotations

import json
import logging
import secrets
import threading
import time
from dataclasses import dataclass, field

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .config import ServiceConfig
from .corpus import Document, InvertedIndex, build_index, load_corpus
from .delivery import (
    ConfigurationError,
    DeliveryRequest,
    DeliveryService,
    ProfileStore,
    UnsupportedFormatError,
    render,
)
from .dialog import (
    DialogState,
    IllegalTransition,
    PreconditionError,
    Session,
    SessionSettings,
)

logger = logging.getLogger("spokensearch.service")


class LoginBody(BaseModel):
    pin: str


class QueryBody(BaseModel):
    utterance: str
    mode: str = "typed"
    n_recognizers: int | None = None
    accuracy: float | None = None
    seed: int | None = None


class ConfirmBody(BaseModel):
    position: int
    choice: str
    alternative: int | None = None


class BrowseBody(BaseModel):
    action: str


class ApproveBody(BaseModel):
    original: str
    candidate: str


class FeedbackBody(BaseModel):
    approve: ApproveBody | None = None


class DeliveryBody(BaseModel):
    doc_ids: list[str]
    channel: str
    format: str = "ascii"


class AdminIndexBody(BaseModel):
    corpus_path: str
    format: str = "trec-sgml-like"


@dataclass
class _SessionEntry:
    session: Session
    lock: threading.Lock = field(default_factory=threading.Lock)
    last_activity: float = field(default_factory=time.monotonic)


class AppState:
    def __init__(
        self,
        config: ServiceConfig,
        docs: list[Document],
        index: InvertedIndex,
        profiles: ProfileStore,
        delivery: DeliveryService,
    ) -> None:
        self.config = config
        self.docs = {d.doc_id: d for d in docs}
        self.index = index
        self.profiles = profiles
        self.delivery = delivery
        self.sessions: dict[str, _SessionEntry] = {}
        self._registry_lock = threading.Lock()

    def settings(self) -> SessionSettings:
        return SessionSettings(
            ranking=self.config.ranking,
            summary=self.config.summary,
            error_model=self.config.error_model,
            confirm_threshold=self.config.confirm_threshold,
            n_recognizers=self.config.n_recognizers,
        )

    def create_session(self) -> tuple[str, _SessionEntry]:
        session_id = secrets.token_hex(16)
        entry = _SessionEntry(session=Session(self.docs, self.index, self.profiles, self.settings()))
        with self._registry_lock:
            self._prune(time.monotonic())
            self.sessions[session_id] = entry
        return session_id, entry

    def get_session(self, session_id: str) -> _SessionEntry | None:
        now = time.monotonic()
        with self._registry_lock:
            self._prune(now)
            entry = self.sessions.get(session_id)
            if entry is not None:
                entry.last_activity = now
            return entry

    def _prune(self, now: float) -> None:
        timeout = self.config.session_timeout_s
        stale = [sid for sid, e in self.sessions.items() if now - e.last_activity > timeout]
        for sid in stale:
            del self.sessions[sid]

    def swap_index(self, docs: list[Document], index: InvertedIndex) -> None:
        # New sessions see the new snapshot; live sessions keep theirs.
        self.docs = {d.doc_id: d for d in docs}
        self.index = index


def _view(session_id: str, entry: _SessionEntry, state: AppState) -> dict:
    s = entry.session
    ranked = None
    if s.ranked is not None:
        ranked = {
            "entries": [
                {
                    "doc_id": doc_id,
                    "score": score,
                    "title": s.docs[doc_id].title if doc_id in s.docs else "",
                }
                for doc_id, score in s.ranked.entries
            ],
            "threshold": s.ranked.threshold,
            "surely_relevant": s.ranked.surely_relevant_count,
        }
    summary = None
    if s.last_summary is not None:
        doc_id, text = s.last_summary
        summary = {
            "doc_id": doc_id,
            "title": s.docs[doc_id].title if doc_id in s.docs else "",
            "text": text,
        }
    return {
        "session_id": session_id,
        "state": s.state.value,
        "user_id": s.user_id,
        "transcript": s.transcript_view(),
        "pending": [
            {
                "position": c.position,
                "surface": c.surface,
                "confidence": c.confidence,
                "alternatives": list(c.alternatives),
            }
            for c in sorted(s.pending.values(), key=lambda c: c.position)
        ],
        "query": None
        if s.query is None
        else {
            "origin": s.query.origin,
            "terms": [
                {
                    "term": t.term,
                    "surface": t.surface,
                    "weight": t.weight,
                    "confidence": t.confidence,
                }
                for t in s.query.terms
            ],
        },
        "ranked": ranked,
        "cursor": s.cursor,
        "presentation": list(s.presentation),
        "retrieved_set": list(s.retrieved_set),
        "summary": summary,
        "suggestions": [
            {
                "original": g.original.term,
                "candidate": g.candidate,
                "similarity": g.similarity,
                "support": g.support,
            }
            for g in s.suggestions
        ],
        "confirm_threshold": s.settings.confirm_threshold,
        "seed": s.base_seed,
        "emissions": len(s.emissions),
    }


def create_app(
    config: ServiceConfig | None = None,
    docs: list[Document] | None = None,
    index: InvertedIndex | None = None,
    profiles: ProfileStore | None = None,
    delivery: DeliveryService | None = None,
) -> FastAPI:
    """Build the service application.

    When ``docs``/``index`` are not supplied they are loaded from the
    config's corpus path.  Tests commonly inject all dependencies.
    """
    config = config or ServiceConfig()
    if docs is None:
        if config.corpus_path is None:
            docs = []
        else:
            docs = load_corpus(config.corpus_path, config.corpus_format)
    if index is None:
        index = build_index(docs)
    if profiles is None:
        profiles = ProfileStore(config.profiles_path)
    if delivery is None:
        delivery = DeliveryService(config.outbox_dir)

    state = AppState(config, docs, index, profiles, delivery)
    app = FastAPI(title="spokensearch", version="0.1.0")
    app.state.search = state

    @app.exception_handler(RequestValidationError)
    async def _bad_request(_request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": str(exc.errors())})

    @app.middleware("http")
    async def _request_log(request: Request, call_next):
        started = time.monotonic()
        response = await call_next(request)
        logger.info(
            json.dumps(
                {
                    "method": request.method,
                    "path": request.url.path,
                    "status": response.status_code,
                    "ms": round((time.monotonic() - started) * 1000, 3),
                }
            )
        )
        return response

    def _not_found() -> JSONResponse:
        return JSONResponse(status_code=404, content={"error": "unknown session"})

    def _run(entry: _SessionEntry, fn):
        """Serialize one session op and map library errors to HTTP codes."""
        with entry.lock:
            try:
                fn()
            except IllegalTransition as exc:
                return JSONResponse(status_code=409, content={"error": str(exc)})
            except PreconditionError as exc:
                return JSONResponse(status_code=409, content={"error": str(exc)})
            except (ValueError, UnsupportedFormatError, ConfigurationError) as exc:
                return JSONResponse(status_code=400, content={"error": str(exc)})
        return None

    @app.post("/sessions")
    def create_session():
        session_id, entry = state.create_session()
        return _view(session_id, entry, state)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        entry = state.get_session(session_id)
        if entry is None:
            return _not_found()
        with entry.lock:
            return _view(session_id, entry, state)

    @app.post("/sessions/{session_id}/login")
    def login(session_id: str, body: LoginBody):
        entry = state.get_session(session_id)
        if entry is None:
            return _not_found()
        error = _run(entry, lambda: entry.session.login(body.pin))
        return error or _view(session_id, entry, state)

    @app.post("/sessions/{session_id}/query")
    def query(session_id: str, body: QueryBody):
        entry = state.get_session(session_id)
        if entry is None:
            return _not_found()
        seed = body.seed
        if seed is None and body.mode == "spoken-simulated":
            seed = secrets.randbits(32)
        error = _run(
            entry,
            lambda: entry.session.submit_query(
                body.utterance,
                body.mode,
                n_recognizers=body.n_recognizers,
                seed=seed,
                accuracy=body.accuracy,
            ),
        )
        return error or _view(session_id, entry, state)

    @app.post("/sessions/{session_id}/confirm")
    def confirm(session_id: str, body: ConfirmBody):
        entry = state.get_session(session_id)
        if entry is None:
            return _not_found()
        error = _run(
            entry,
            lambda: entry.session.confirm_word(body.position, body.choice, body.alternative),
        )
        return error or _view(session_id, entry, state)

    @app.post("/sessions/{session_id}/browse")
    def browse(session_id: str, body: BrowseBody):
        entry = state.get_session(session_id)
        if entry is None:
            return _not_found()
        error = _run(entry, lambda: entry.session.browse(body.action))
        return error or _view(session_id, entry, state)

    @app.post("/sessions/{session_id}/feedback")
    def feedback(session_id: str, body: FeedbackBody | None = None):
        entry = state.get_session(session_id)
        if entry is None:
            return _not_found()
        if body is not None and body.approve is not None:
            approve = body.approve
            error = _run(
                entry, lambda: entry.session.apply_suggestion(approve.original, approve.candidate)
            )
        else:
            error = _run(entry, lambda: entry.session.feedback_requery())
        return error or _view(session_id, entry, state)

    @app.post("/sessions/{session_id}/delivery")
    def delivery_endpoint(session_id: str, body: DeliveryBody):
        entry = state.get_session(session_id)
        if entry is None:
            return _not_found()
        session = entry.session
        with entry.lock:
            try:
                if session.state in (DialogState.AWAITING_LOGIN, DialogState.CLOSED):
                    raise IllegalTransition(
                        f"delivery is not accepted in state {session.state.value!r}"
                    )
                if body.channel == "voice":
                    session.read_out(body.doc_ids)
                    text = "".join(
                        render(session.docs[d], "ascii").decode("utf-8") for d in body.doc_ids
                    )
                    receipt = {
                        "receipt_id": secrets.token_hex(8),
                        "channel": "voice",
                        "target": session.user_id,
                        "byte_count": len(text.encode("utf-8")),
                        "timestamp": time.time(),
                        "status": "delivered",
                        "error": None,
                    }
                    return {"receipt": receipt}
                if session.profile is None:
                    raise PreconditionError("delivery needs a logged-in user profile")
                missing = [d for d in body.doc_ids if d not in session.docs]
                if missing:
                    raise PreconditionError(f"unknown documents: {missing}")
                rendered = b"".join(render(session.docs[d], body.format) for d in body.doc_ids)
                request = DeliveryRequest(
                    doc_ids=tuple(body.doc_ids), channel=body.channel, format=body.format
                )
                receipt = state.delivery.deliver(request, rendered, session.profile)
                return {"receipt": receipt.to_dict()}
            except (IllegalTransition, PreconditionError) as exc:
                return JSONResponse(status_code=409, content={"error": str(exc)})
            except (ValueError, UnsupportedFormatError, ConfigurationError) as exc:
                return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.post("/admin/index")
    def admin_index(body: AdminIndexBody):
        try:
            docs_new = load_corpus(body.corpus_path, body.format)
        except (OSError, ValueError) as exc:
            return JSONResponse(status_code=400, content={"error": str(exc)})
        index_new = build_index(docs_new)
        state.swap_index(docs_new, index_new)
        return {
            "doc_count": index_new.doc_count,
            "vocabulary_size": len(index_new.vocabulary),
        }

    if config.ui_dir:
        from pathlib import Path

        from fastapi.staticfiles import StaticFiles

        ui_path = Path(config.ui_dir)
        if ui_path.is_dir():
            app.mount("/ui", StaticFiles(directory=str(ui_path), html=True), name="ui")

    return app


def run_service(config: ServiceConfig, **app_kwargs) -> None:
    """Blocking entry point used by the CLI."""
    import uvicorn

    app = create_app(config, **app_kwargs)
    print(f"spokensearch service listening on http://{config.host}:{config.port}")
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
