"""HTTP API over a loaded collection: query, scenario lookup, health.

The collection is loaded once (in the background at startup) and then
served read-only; queries run over an immutable snapshot, so request
handling needs no locking. Re-indexing means restarting the server.
"""

from __future__ import annotations

import socket
import threading
import time
from contextlib import asynccontextmanager
from dataclasses import dataclass
from pathlib import Path
from urllib.parse import urlsplit

from fastapi import FastAPI
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import store
from .embed import Embedder
from .errors import (
    EmbedderMismatch,
    EmbedderServiceUnavailable,
    GeniusError,
    NoTokens,
)
from .retrieve import search

STATE_OK = "ok"
STATE_DEGRADED = "degraded"
STATE_LOADING = "loading"

_PROBE_TTL_S = 5.0
_PROBE_TIMEOUT_S = 0.5


@dataclass
class ServiceStatus:
    state: str
    collection_name: str
    record_count: int
    embedder_id: str
    uptime_s: float

    def to_dict(self) -> dict:
        return {
            "state": self.state,
            "collection_name": self.collection_name,
            "record_count": self.record_count,
            "embedder_id": self.embedder_id,
            "uptime_s": self.uptime_s,
        }


class ServiceState:
    """Owns the collection snapshot plus health bookkeeping."""

    def __init__(self, store_path: str | Path, embedder: Embedder) -> None:
        self.store_path = Path(store_path)
        self.embedder = embedder
        self.collection: store.Collection | None = None
        self.load_error: str | None = None
        self.started_at = time.monotonic()
        self._probe_cache: tuple[float, bool] | None = None
        self._embed_failing = False

    def load(self) -> None:
        try:
            self.collection = store.load(self.store_path)
            self.load_error = None
        except GeniusError as exc:
            self.load_error = str(exc)

    def load_in_background(self) -> None:
        threading.Thread(target=self.load, daemon=True).start()

    def note_embed_failure(self) -> None:
        self._embed_failing = True

    def note_embed_success(self) -> None:
        self._embed_failing = False

    def _endpoint_reachable(self) -> bool:
        endpoint = getattr(self.embedder, "endpoint_root", None)
        if endpoint is None:
            return True
        now = time.monotonic()
        if self._probe_cache is not None and now - self._probe_cache[0] < _PROBE_TTL_S:
            return self._probe_cache[1]
        parts = urlsplit(endpoint)
        host = parts.hostname or "localhost"
        port = parts.port or (443 if parts.scheme == "https" else 80)
        try:
            with socket.create_connection((host, port), timeout=_PROBE_TIMEOUT_S):
                reachable = True
        except OSError:
            reachable = False
        self._probe_cache = (now, reachable)
        return reachable

    def current_state(self) -> str:
        if self.collection is None:
            return STATE_DEGRADED if self.load_error else STATE_LOADING
        if self._embed_failing or not self._endpoint_reachable():
            return STATE_DEGRADED
        return STATE_OK

    def status(self) -> ServiceStatus:
        collection = self.collection
        return ServiceStatus(
            state=self.current_state(),
            collection_name=collection.name if collection else "",
            record_count=len(collection) if collection else 0,
            embedder_id=self.embedder.embedder_id,
            uptime_s=round(time.monotonic() - self.started_at, 3),
        )


class QueryBody(BaseModel):
    text: str
    n: int = 10


def create_app(
    state: ServiceState,
    cors_origins: list[str] | None = None,
    autoload: bool = True,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    lifespan = None
    if autoload:
        @asynccontextmanager
        async def lifespan(_: FastAPI):
            state.load_in_background()
            yield

    app = FastAPI(title="genius", docs_url=None, redoc_url=None, lifespan=lifespan)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=cors_origins or ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.service = state

    @app.exception_handler(RequestValidationError)
    async def malformed_body(_, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"error": str(exc.errors())})

    @app.post("/api/query")
    async def api_query(body: QueryBody) -> JSONResponse:
        if body.n < 1:
            return JSONResponse(status_code=400, content={"error": "n must be >= 1"})
        if state.collection is None:
            return JSONResponse(
                status_code=503,
                content={
                    "error": state.load_error or "collection not loaded yet",
                    "state": state.current_state(),
                },
            )
        try:
            result = search(state.collection, body.text, state.embedder, n=body.n)
        except NoTokens as exc:
            return JSONResponse(status_code=400, content={"error": str(exc)})
        except EmbedderMismatch as exc:
            return JSONResponse(status_code=409, content={"error": str(exc)})
        except EmbedderServiceUnavailable as exc:
            state.note_embed_failure()
            return JSONResponse(
                status_code=503,
                content={"error": str(exc), "state": state.current_state()},
            )
        state.note_embed_success()
        return JSONResponse(status_code=200, content=result.to_dict())

    @app.get("/api/status")
    async def api_status() -> JSONResponse:
        return JSONResponse(status_code=200, content=state.status().to_dict())

    @app.get("/api/scenario/{scenario_id}")
    async def api_scenario(scenario_id: str) -> JSONResponse:
        collection = state.collection
        record = collection.get(scenario_id) if collection else None
        if record is None:
            return JSONResponse(
                status_code=404,
                content={"error": f"unknown scenario id {scenario_id!r}"},
            )
        return JSONResponse(
            status_code=200,
            content={
                "id": record.id,
                "description": record.description,
                "metadata": dict(record.metadata),
            },
        )

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
