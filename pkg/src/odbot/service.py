"""Chat service: session lifecycle, the message round-trip, and the HTTP API.

Sessions are in-memory with idle-TTL eviction. Each request for a session is
serialized behind a per-session lock; the models and the catalog index are
immutable shared state.
"""

from __future__ import annotations

import threading
import time
import uuid
from contextlib import asynccontextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .bundle import Bundle, load_bundle
from .catalog import Index, load_catalog
from .dialogue import Tracker, UnknownSlotError, new_tracker, update_tracker
from .entities import Gazetteer, extract_entities
from .intents import (
    DEFAULT_CONFIDENCE_THRESHOLD,
    LOW_CONFIDENCE,
    PayloadError,
    classify_intent,
    parse_payload,
)
from .manager import DialogueManager
from .responses import BotResponse, Renderer, load_templates

DEFAULT_TTL_MINUTES = 30.0

PAYLOAD_CLARIFICATION = "Sorry, I could not read that option. Could you try again?"
SLOT_CLARIFICATION = "Sorry, I do not know that field. Could you try again?"


class SessionNotFound(KeyError):
    pass


@dataclass
class _Session:
    tracker: Tracker
    created: float
    touched: float
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionStore:
    """In-memory tracker store with idle-TTL eviction."""

    def __init__(
        self,
        ttl_minutes: float = DEFAULT_TTL_MINUTES,
        clock: Callable[[], float] = time.monotonic,
    ):
        self.ttl_seconds = ttl_minutes * 60.0
        self.clock = clock
        self._sessions: dict[str, _Session] = {}
        self._lock = threading.Lock()

    def create(self) -> str:
        session_id = uuid.uuid4().hex
        now = self.clock()
        with self._lock:
            self._sessions[session_id] = _Session(
                tracker=new_tracker(session_id), created=now, touched=now
            )
        return session_id

    def _evict_expired(self, now: float) -> None:
        expired = [
            sid
            for sid, session in self._sessions.items()
            if now - session.touched > self.ttl_seconds
        ]
        for sid in expired:
            del self._sessions[sid]

    def get(self, session_id: str) -> _Session:
        """Look up a live session, touching its idle timer."""
        now = self.clock()
        with self._lock:
            self._evict_expired(now)
            session = self._sessions.get(session_id)
            if session is None:
                raise SessionNotFound(session_id)
            session.touched = now
            return session

    def __len__(self) -> int:
        with self._lock:
            self._evict_expired(self.clock())
            return len(self._sessions)


class ChatPipeline:
    """The full message round-trip against one set of trained models."""

    def __init__(
        self,
        bundle: Bundle,
        gazetteer: Gazetteer,
        manager: DialogueManager,
        confidence_threshold: float = DEFAULT_CONFIDENCE_THRESHOLD,
    ):
        self.bundle = bundle
        self.gazetteer = gazetteer
        self.manager = manager
        self.confidence_threshold = confidence_threshold

    def handle_message(self, tracker: Tracker, text: str) -> list[BotResponse]:
        """Interpret one user message and produce the bot's responses."""
        try:
            payload = parse_payload(text)
        except PayloadError:
            return [BotResponse(text=PAYLOAD_CLARIFICATION)]
        if payload is not None:
            intent, slot_writes = payload
            entities: list[tuple[str, str]] = []
        else:
            slot_writes = {}
            mentions = extract_entities(self.bundle.crf_model, self.gazetteer, text)
            prediction = classify_intent(self.bundle.intent_model, text)
            if prediction.confidence < self.confidence_threshold:
                intent = LOW_CONFIDENCE
                entities = []  # no slot writes on an unsure parse
            else:
                intent = prediction.intent
                entities = [(m.entity_type, m.surface) for m in mentions]
        try:
            update_tracker(
                tracker, intent, entities=entities, slot_writes=slot_writes, text=text
            )
        except UnknownSlotError:
            return [BotResponse(text=SLOT_CLARIFICATION)]
        if intent == LOW_CONFIDENCE:
            return self.manager.reprompt(tracker)
        return self.manager.select_actions(tracker)


@dataclass
class ServiceConfig:
    model_dir: Path
    catalog_path: Path
    gazetteer_path: Path
    templates_path: Path
    ttl_minutes: float = DEFAULT_TTL_MINUTES
    allowed_origin: str | None = None
    confidence_threshold: float = DEFAULT_CONFIDENCE_THRESHOLD


@dataclass
class Runtime:
    pipeline: ChatPipeline
    store: SessionStore
    index: Index
    model_version: str


def build_runtime(config: ServiceConfig) -> Runtime:
    bundle = load_bundle(config.model_dir)
    index = load_catalog(config.catalog_path)
    gazetteer = Gazetteer.from_file(config.gazetteer_path)
    templates = load_templates(config.templates_path)
    manager = DialogueManager(
        policy=bundle.policy_model,
        renderer=Renderer(templates, index),
        index=index,
    )
    pipeline = ChatPipeline(
        bundle=bundle,
        gazetteer=gazetteer,
        manager=manager,
        confidence_threshold=config.confidence_threshold,
    )
    store = SessionStore(ttl_minutes=config.ttl_minutes)
    return Runtime(
        pipeline=pipeline,
        store=store,
        index=index,
        model_version=bundle.model_version,
    )


class MessageBody(BaseModel):
    text: str


def create_app(config: ServiceConfig) -> FastAPI:
    """HTTP front of the pipeline; models load on startup."""

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        app.state.runtime = build_runtime(config)
        yield

    app = FastAPI(title="odbot", lifespan=lifespan)
    app.state.runtime = None

    if config.allowed_origin:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=[config.allowed_origin],
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": "malformed body"})

    def runtime_or_503() -> Runtime | JSONResponse:
        runtime = app.state.runtime
        if runtime is None:
            return JSONResponse(status_code=503, content={"status": "loading"})
        return runtime

    @app.get("/api/health")
    def health():
        runtime = runtime_or_503()
        if isinstance(runtime, JSONResponse):
            return runtime
        return {"status": "ok", "model_version": runtime.model_version}

    @app.post("/api/sessions")
    def create_session():
        runtime = runtime_or_503()
        if isinstance(runtime, JSONResponse):
            return runtime
        return {"session_id": runtime.store.create()}

    @app.post("/api/sessions/{session_id}/messages")
    def post_message(session_id: str, body: MessageBody):
        runtime = runtime_or_503()
        if isinstance(runtime, JSONResponse):
            return runtime
        try:
            session = runtime.store.get(session_id)
        except SessionNotFound:
            return JSONResponse(
                status_code=404, content={"detail": "unknown session"}
            )
        with session.lock:
            responses = runtime.pipeline.handle_message(session.tracker, body.text)
        return {"responses": [r.to_payload() for r in responses]}

    @app.get("/api/sessions/{session_id}/debug")
    def debug_session(session_id: str):
        runtime = runtime_or_503()
        if isinstance(runtime, JSONResponse):
            return runtime
        try:
            session = runtime.store.get(session_id)
        except SessionNotFound:
            return JSONResponse(
                status_code=404, content={"detail": "unknown session"}
            )
        return session.tracker.snapshot()

    return app
