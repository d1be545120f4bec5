"""HTTP surface over TraceService.

POST /v1/events       body: JSON array of event envelopes
POST /v1/infections   body: {associate_hash, report_ms[, state]}
GET  /v1/trace?source=&levels=&from=&to=
GET  /v1/risk
GET  /v1/clusters?min_weight=&min_size=
GET  /v1/graph?from=&to=

All timestamps are epoch-ms UTC integers, hashes/tokens lowercase hex.
Errors come back as {"error": {"code", "message"}} with a 400/404 status.
Authentication is a stub: any bearer token (or none) is accepted.
"""
from __future__ import annotations

import time
from pathlib import Path
from typing import Optional

from fastapi import Body, FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from ..errors import InvalidParameter, ProxigraphError, UnknownAssociate
from .store import TraceService

MAX_TRACE_LEVELS = 16


def _error_doc(code: str, message: str) -> dict:
    return {"error": {"code": code, "message": message}}


def _int_param(name: str, value: str, default: Optional[int] = None) -> int:
    if value is None or value == "":
        if default is None:
            raise InvalidParameter(f"missing parameter {name}")
        return default
    try:
        return int(value)
    except ValueError:
        raise InvalidParameter(f"parameter {name} must be an integer, got {value!r}") from None


def _float_param(name: str, value: str, default: Optional[float] = None) -> float:
    if value is None or value == "":
        if default is None:
            raise InvalidParameter(f"missing parameter {name}")
        return default
    try:
        return float(value)
    except ValueError:
        raise InvalidParameter(f"parameter {name} must be a number, got {value!r}") from None


def create_app(service: TraceService, console_dir: Optional[Path] = None) -> FastAPI:
    app = FastAPI(title="proxigraph trace service", docs_url=None, redoc_url=None)

    @app.exception_handler(ProxigraphError)
    async def _on_domain_error(request: Request, exc: ProxigraphError):
        status = 404 if isinstance(exc, UnknownAssociate) else 400
        return JSONResponse(status_code=status, content=_error_doc(exc.code, str(exc)))

    @app.exception_handler(RequestValidationError)
    async def _on_validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content=_error_doc("invalid_parameter", str(exc)))

    @app.post("/v1/events")
    def post_events(envelopes: list = Body(...)):
        return service.ingest_batch(envelopes)

    @app.post("/v1/infections")
    def post_infection(body: dict = Body(...)):
        associate_hash = body.get("associate_hash", "")
        report_ms = body.get("report_ms")
        if not isinstance(report_ms, int):
            raise InvalidParameter("report_ms must be an epoch-ms integer")
        state = body.get("state", "reported")
        return service.report_infection(associate_hash, report_ms, state)

    # `from` is a keyword, so the window parameters are read off the raw query
    @app.get("/v1/trace")
    def get_trace(request: Request):
        q = request.query_params
        source = q.get("source", "")
        if not source:
            raise InvalidParameter("missing parameter source")
        levels = _int_param("levels", q.get("levels"), default=None)
        if not 0 <= levels <= MAX_TRACE_LEVELS:
            raise InvalidParameter(f"levels must be in [0, {MAX_TRACE_LEVELS}]")
        t0 = _int_param("from", q.get("from"), default=0)
        t1 = _int_param("to", q.get("to"), default=_now_ms())
        return service.get_trace(source, levels, (t0, t1))

    @app.get("/v1/risk")
    def get_risk():
        return service.get_risk()

    @app.get("/v1/clusters")
    def get_clusters(request: Request):
        q = request.query_params
        min_weight = _float_param("min_weight", q.get("min_weight"), default=0.0)
        min_size = _int_param("min_size", q.get("min_size"), default=2)
        if min_size < 1:
            raise InvalidParameter("min_size must be >= 1")
        return service.get_clusters(min_weight, min_size)

    @app.get("/v1/graph")
    def get_graph(request: Request):
        q = request.query_params
        t0 = _int_param("from", q.get("from"), default=0)
        t1 = _int_param("to", q.get("to"), default=_now_ms())
        return service.get_graph_snapshot((t0, t1))

    if console_dir is not None and Path(console_dir).exists():
        app.mount("/", StaticFiles(directory=console_dir, html=True), name="console")

    return app


def _now_ms() -> int:
    return int(time.time() * 1000)
