"""HTTP facade over one engine instance.

All mutating requests funnel through a single lock (the engine is a single
logical writer); the number of requests waiting on that lock is bounded and
overflow is answered with 503. Reads take the same lock briefly, so every
response reflects a consistent state between commands. Response shapes are
documented by the JSON Schema files in ``fabula/schemas``.
"""

from __future__ import annotations

import threading
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from .engine import Engine
from .errors import BadArgument, EngineError, NarrationError, ParseError
from .render import render_candidates, render_focus, render_memory, render_shadow

DEFAULT_QUEUE_LIMIT = 128

_STATUS_BY_CODE = {
    "parse_error": 400,
    "unknown_word": 400,
    "no_referent": 400,
    "unknown_id": 404,
    "bad_position": 400,
    "bad_request": 400,
}


class QueueOverflow(Exception):
    pass


def _error_body(code: str, message: str, line: Optional[int] = None, col: Optional[int] = None) -> dict:
    location = None
    if line is not None or col is not None:
        location = {"line": line, "col": col}
    return {"error": {"code": code, "message": message, "location": location}}


def _engine_error_response(exc: EngineError, extra: Optional[dict] = None) -> JSONResponse:
    line = getattr(exc, "line", None)
    cause = getattr(exc, "cause", exc)
    col = getattr(cause, "col", None)
    code = exc.code if exc.code in _STATUS_BY_CODE else "bad_request"
    body = _error_body(code, str(exc), line, col)
    if extra:
        body.update(extra)
    return JSONResponse(status_code=_STATUS_BY_CODE[code], content=body)


class _CommandGate:
    """Serializes commands; at most ``limit`` callers may wait at once."""

    def __init__(self, limit: int):
        self._lock = threading.Lock()
        self._depth = 0
        self._depth_lock = threading.Lock()
        self._limit = limit

    def __enter__(self):
        with self._depth_lock:
            if self._depth >= self._limit:
                raise QueueOverflow()
            self._depth += 1
        self._lock.acquire()
        return self

    def __exit__(self, *exc_info):
        self._lock.release()
        with self._depth_lock:
            self._depth -= 1
        return False


def create_app(engine: Engine, ui_dir: Optional[str] = None, queue_limit: int = DEFAULT_QUEUE_LIMIT) -> FastAPI:
    app = FastAPI(title="fabula", docs_url=None, redoc_url=None)
    gate = _CommandGate(queue_limit)

    @app.exception_handler(QueueOverflow)
    async def _overflow(request: Request, exc: QueueOverflow):
        return JSONResponse(status_code=503, content=_error_body("bad_request", "command queue full"))

    @app.exception_handler(EngineError)
    async def _engine_error(request: Request, exc: EngineError):
        return _engine_error_response(exc)

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content=_error_body("bad_request", str(exc)))

    async def _json_body(request: Request) -> dict:
        try:
            body = await request.json()
        except Exception:
            raise BadArgument("request body must be a JSON object") from None
        if not isinstance(body, dict):
            raise BadArgument("request body must be a JSON object")
        return body

    @app.post("/api/narrate")
    async def narrate(request: Request):
        body = await _json_body(request)
        text = body.get("text")
        if not isinstance(text, str):
            raise BadArgument("field 'text' must be a string")
        with gate:
            try:
                inserted = engine.narrate(text)
            except NarrationError as exc:
                return _engine_error_response(exc, extra={"inserted": exc.inserted})
        return {"inserted": inserted, "diagnostics": []}

    @app.get("/api/focus")
    def focus():
        with gate:
            return render_focus(engine)

    @app.get("/api/shadow/{entity_id}")
    def shadow(entity_id: int):
        with gate:
            return render_shadow(engine, entity_id)

    @app.get("/api/hls")
    def hls(top: str = "5"):
        top_n = _parse_int("top", top, minimum=1)
        with gate:
            return {"candidates": render_candidates(engine.build_continuations(top_n))}

    @app.get("/api/memory")
    def memory(request: Request):
        lo = _opt_int(request.query_params.get("from"), "from")
        hi = _opt_int(request.query_params.get("to"), "to")
        with gate:
            return render_memory(engine, lo, hi)

    @app.get("/api/state/hash")
    def state_hash():
        with gate:
            return {"hash": engine.state_hash()}

    @app.post("/api/confabulate")
    async def confabulate(request: Request):
        body = await _json_body(request)
        steps = body.get("steps")
        if not isinstance(steps, int) or isinstance(steps, bool) or steps < 1:
            raise BadArgument("field 'steps' must be an integer >= 1")
        with gate:
            inserted = engine.confabulate(steps)
        return {"inserted": inserted}

    @app.post("/api/cloze")
    async def cloze(request: Request):
        body = await _json_body(request)
        position = body.get("position")
        if not isinstance(position, int) or isinstance(position, bool):
            raise BadArgument("field 'position' must be an integer")
        top = body.get("top", 5)
        if not isinstance(top, int) or isinstance(top, bool) or top < 1:
            raise BadArgument("field 'top' must be an integer >= 1")
        with gate:
            return {"candidates": render_candidates(engine.cloze_infer(position, top))}

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def _parse_int(name: str, raw: str, minimum: int) -> int:
    try:
        value = int(raw)
    except (TypeError, ValueError):
        raise BadArgument(f"query parameter {name!r} must be an integer") from None
    if value < minimum:
        raise BadArgument(f"query parameter {name!r} must be >= {minimum}")
    return value


def _opt_int(raw: Optional[str], name: str) -> Optional[int]:
    if raw is None or raw == "":
        return None
    try:
        return int(raw)
    except ValueError:
        raise BadArgument(f"query parameter {name!r} must be an integer") from None
