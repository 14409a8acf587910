"""HTTP API binding the engine, store and index into a running service.

All error responses share one JSON shape, {"error": <code>, "message": ...},
with codes drawn from the closed set in ERROR_CODES. Request bodies are
validated by hand so invalid enums and ratings surface as 400s with those
codes rather than framework-shaped validation errors.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any, Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response

from .cycle import InputError, PlanGenerationFailed
from .domain import Familiarity, Role
from .gateway import GatewayError
from .persistence import METRICS, ConflictError, NotFound
from .rag import CorpusError
from .runtime import TutorRuntime

API_VERSION = "v1"

ERROR_CODES = (
    "invalid_request",
    "invalid_enum",
    "invalid_rating",
    "empty_message",
    "bad_path",
    "not_found",
    "turn_in_flight",
    "gateway_failure",
)


def _error(status: int, code: str, message: str) -> JSONResponse:
    assert code in ERROR_CODES
    return JSONResponse(status_code=status, content={"error": code, "message": message})


def create_app(runtime: TutorRuntime) -> FastAPI:
    app = FastAPI(title="tutor-engine", version=API_VERSION, docs_url=None, redoc_url=None)
    app.state.runtime = runtime

    @app.post("/api/sessions", status_code=201)
    async def create_session(request: Request) -> Any:
        body = await _json_body(request)
        if body is None:
            return _error(400, "invalid_request", "body must be a JSON object")
        learner_id = body.get("learner_id")
        if not isinstance(learner_id, str) or not learner_id.strip():
            return _error(400, "invalid_request", "learner_id must be a non-empty string")
        try:
            role = Role(body.get("role"))
            familiarity = Familiarity(body.get("familiarity"))
        except ValueError:
            return _error(
                400,
                "invalid_enum",
                f"role must be one of {[r.value for r in Role]} and familiarity one of "
                f"{[f.value for f in Familiarity]}",
            )
        session_id = runtime.create_session(learner_id.strip(), role.value, familiarity.value)
        return {"session_id": session_id}

    @app.post("/api/sessions/{session_id}/messages")
    async def post_message(session_id: str, request: Request) -> Any:
        body = await _json_body(request)
        if body is None:
            return _error(400, "invalid_request", "body must be a JSON object")
        text = body.get("text")
        if not isinstance(text, str):
            return _error(400, "invalid_request", "text must be a string")
        if not text.strip():
            return _error(422, "empty_message", "text must be non-empty")
        try:
            response = runtime.post_message(session_id, text)
        except NotFound as exc:
            return _error(404, "not_found", str(exc))
        except ConflictError as exc:
            return _error(409, "turn_in_flight", str(exc))
        except InputError as exc:
            return _error(422, "empty_message", str(exc))
        except (GatewayError, PlanGenerationFailed) as exc:
            return _error(502, "gateway_failure", f"{type(exc).__name__}: {exc}")
        doc = response.to_dict()
        doc["citation_details"] = runtime.citation_details(
            response.citations, runtime.current_index()
        )
        return doc

    @app.get("/api/sessions/{session_id}")
    async def get_session(session_id: str) -> Any:
        try:
            return runtime.get_session_view(session_id)
        except NotFound as exc:
            return _error(404, "not_found", str(exc))

    @app.get("/api/sessions/{session_id}/plan")
    async def get_plan(session_id: str) -> Any:
        try:
            return {"plan": runtime.get_plan(session_id)}
        except NotFound as exc:
            return _error(404, "not_found", str(exc))

    @app.post("/api/sessions/{session_id}/feedback", response_model=None)
    async def post_feedback(session_id: str, request: Request) -> Any:
        body = await _json_body(request)
        if body is None:
            return _error(400, "invalid_request", "body must be a JSON object")
        ratings = body.get("ratings")
        if not isinstance(ratings, dict) or not ratings:
            return _error(400, "invalid_rating", "ratings must be a non-empty object")
        for name, value in ratings.items():
            if name not in METRICS:
                return _error(
                    400, "invalid_rating", f"unknown metric {name!r}; valid: {list(METRICS)}"
                )
            if not isinstance(value, int) or isinstance(value, bool) or not 1 <= value <= 5:
                return _error(
                    400, "invalid_rating", f"rating for {name} must be an integer in [1, 5]"
                )
        free_text = body.get("free_text")
        if free_text is not None and not isinstance(free_text, str):
            return _error(400, "invalid_request", "free_text must be a string")
        turn_index = body.get("turn_index")
        if turn_index is not None and not isinstance(turn_index, int):
            return _error(400, "invalid_request", "turn_index must be an integer")
        try:
            runtime.submit_feedback(session_id, ratings, free_text, turn_index)
        except NotFound as exc:
            return _error(404, "not_found", str(exc))
        return Response(status_code=204)

    @app.post("/api/admin/ingest")
    async def ingest(request: Request) -> Any:
        body = await _json_body(request)
        if body is None:
            return _error(400, "invalid_request", "body must be a JSON object")
        path = body.get("path")
        if not isinstance(path, str) or not path:
            return _error(400, "bad_path", "path must be a non-empty string")
        try:
            docs, chunks = runtime.ingest(path)
        except CorpusError as exc:
            return _error(400, "bad_path", str(exc))
        return {"docs": docs, "chunks": chunks}

    static_dir = runtime.cfg.static_dir
    if static_dir and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


async def _json_body(request: Request) -> Optional[dict[str, Any]]:
    try:
        body = await request.json()
    except Exception:
        return None
    return body if isinstance(body, dict) else None
