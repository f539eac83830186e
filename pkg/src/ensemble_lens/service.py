"""HTTP facade over the analysis library.

Sessions hold immutable bundles keyed by random 128-bit tokens; every
analysis response is a pure function of (bundle, parameters), built by the
``documents`` module and cached as serialized bytes, so repeated calls and
server restarts yield byte-identical bodies.
"""

from __future__ import annotations

import json
import secrets
import threading
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request, Response

from . import documents
from .bundle import (
    ENSEMBLE_ID,
    EnsembleBundle,
    ReportEntry,
    ValidationReport,
    parse_bundle,
    parse_bundle_document,
    validate_bundle,
)
from .errors import EnsembleLensError, PredictorUnavailable, UnknownModel
from .predictors import Predictor, predictor_for_model
from .weights import ensemble_predictor, evaluate_weights, suggest_weights
from .xai import partial_dependence, permutation_importance

DEFAULT_MAX_UPLOAD = 64 * 1024 * 1024

_STATUS_BY_CODE = {
    "UnknownModel": 404,
    "PredictorUnavailable": 409,
    "HandshakeTimeout": 409,
}
_UNPROCESSABLE = 422  # default for engine errors raised during analysis


@dataclass
class ServiceConfig:
    max_upload_bytes: int = DEFAULT_MAX_UPLOAD
    cache_mb: int = 64
    spill_dir: Optional[str] = None


@dataclass
class Session:
    bundle_id: str
    bundle: EnsembleBundle
    predictors: dict[str, Predictor] = field(default_factory=dict)
    predictor_lock: threading.Lock = field(default_factory=threading.Lock)
    xai_status: dict = field(default_factory=lambda: {"state": "idle", "done": 0, "total": 0})


class _ResponseCache:
    """Byte-budgeted LRU of serialized response bodies. Entries are pure
    functions of their key, so eviction can never change a response."""

    def __init__(self, budget_bytes: int):
        self.budget = budget_bytes
        self.used = 0
        self.entries: OrderedDict[str, bytes] = OrderedDict()
        self.lock = threading.Lock()

    def get(self, key: str) -> Optional[bytes]:
        with self.lock:
            body = self.entries.get(key)
            if body is not None:
                self.entries.move_to_end(key)
            return body

    def put(self, key: str, body: bytes) -> None:
        with self.lock:
            if key in self.entries:
                return
            self.entries[key] = body
            self.used += len(body)
            while self.used > self.budget and len(self.entries) > 1:
                _, evicted = self.entries.popitem(last=False)
                self.used -= len(evicted)

    def drop_prefix(self, prefix: str) -> None:
        with self.lock:
            for key in [k for k in self.entries if k.startswith(prefix)]:
                self.used -= len(self.entries.pop(key))


class ServiceState:
    def __init__(self, config: ServiceConfig):
        self.config = config
        self.sessions: dict[str, Session] = {}
        self.lock = threading.Lock()
        self.cache = _ResponseCache(config.cache_mb * 1024 * 1024)

    def add(self, bundle: EnsembleBundle) -> Session:
        session = Session(bundle_id=secrets.token_hex(16), bundle=bundle)
        with self.lock:
            self.sessions[session.bundle_id] = session
        return session

    def get(self, bundle_id: str) -> Optional[Session]:
        with self.lock:
            return self.sessions.get(bundle_id)

    def close(self) -> None:
        with self.lock:
            for session in self.sessions.values():
                for p in session.predictors.values():
                    p.close()
            self.sessions.clear()


def _json_response(doc, status_code: int = 200) -> Response:
    return Response(content=documents.dumps(doc), status_code=status_code,
                    media_type="application/json")


def _error_response(exc: EnsembleLensError) -> Response:
    status = _STATUS_BY_CODE.get(exc.code, _UNPROCESSABLE)
    return _json_response({"error": {"code": exc.code, "message": str(exc)}}, status)


def _not_found(what: str) -> Response:
    return _json_response({"error": {"code": "NotFound", "message": what}}, 404)


def _session_predictor(session: Session, model_id: str) -> Predictor:
    """Materialize (and cache) the predictor behind a model id or 'ensemble'."""
    with session.predictor_lock:
        if model_id in session.predictors:
            return session.predictors[model_id]
        bundle = session.bundle
        if model_id == ENSEMBLE_ID:
            missing = [m.id for m in bundle.models if m.weight > 0 and not m.predictor_ref]
            if missing:
                raise PredictorUnavailable(
                    f"ensemble explanation needs predictors for models {missing}", models=missing)
            predictor = ensemble_predictor(bundle)
        else:
            predictor = predictor_for_model(bundle, bundle.model(model_id))
        session.predictors[model_id] = predictor
        return predictor


def create_app(config: Optional[ServiceConfig] = None) -> FastAPI:
    config = config or ServiceConfig()
    state = ServiceState(config)
    app = FastAPI(title="ensemble-lens", docs_url=None, redoc_url=None)
    app.state.engine = state

    # single-user local tool: the dashboard may be served from another port
    from fastapi.middleware.cors import CORSMiddleware

    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
                       allow_headers=["*"])

    def cached(session: Session, key: str, build) -> Response:
        cache_key = f"{session.bundle_id}:{key}"
        body = state.cache.get(cache_key)
        if body is None:
            body = documents.dumps(build()).encode("utf-8")
            state.cache.put(cache_key, body)
        return Response(content=body, media_type="application/json")

    @app.get("/api/health")
    def health() -> Response:
        return _json_response({"status": "ok"})

    @app.post("/api/bundles")
    async def create_bundle(request: Request) -> Response:
        raw = await request.body()
        if len(raw) > config.max_upload_bytes:
            return _json_response({"error": {"code": "PayloadTooLarge",
                                             "message": f"upload exceeds {config.max_upload_bytes} bytes"}}, 413)
        try:
            payload = json.loads(raw)
        except json.JSONDecodeError as exc:
            return _json_response({"error": {"code": "SchemaMismatch",
                                             "message": f"request body is not JSON: {exc}"}}, 400)
        try:
            if isinstance(payload, dict) and "path" in payload:
                bundle = parse_bundle(payload["path"])
            elif isinstance(payload, dict) and "bundle" in payload:
                bundle = parse_bundle_document(payload["bundle"])
            else:
                return _json_response({"error": {"code": "SchemaMismatch",
                                                 "message": "body must carry 'path' or 'bundle'"}}, 400)
        except EnsembleLensError as exc:
            report = ValidationReport(errors=[ReportEntry(exc.code, str(exc))])
            return _json_response(documents.validation_document(report), 400)

        report = validate_bundle(bundle)
        if not report.ok:
            return _json_response(documents.validation_document(report), 400)

        session = state.add(bundle)
        if config.spill_dir and isinstance(payload, dict) and "bundle" in payload:
            spill = Path(config.spill_dir)
            spill.mkdir(parents=True, exist_ok=True)
            (spill / f"{session.bundle_id}.json").write_text(
                json.dumps(payload["bundle"]), encoding="utf-8")
        return _json_response({"bundle_id": session.bundle_id,
                               "summary": documents.summary_document(bundle)}, 201)

    @app.get("/api/bundles/{bundle_id}/summary")
    def summary(bundle_id: str) -> Response:
        session = state.get(bundle_id)
        if session is None:
            return _not_found(f"unknown bundle id {bundle_id!r}")
        return cached(session, "summary", lambda: documents.summary_document(session.bundle))

    @app.get("/api/bundles/{bundle_id}/metrics")
    def metrics(bundle_id: str) -> Response:
        session = state.get(bundle_id)
        if session is None:
            return _not_found(f"unknown bundle id {bundle_id!r}")
        try:
            return cached(session, "metrics", lambda: documents.metrics_document(session.bundle))
        except EnsembleLensError as exc:
            return _error_response(exc)

    @app.get("/api/bundles/{bundle_id}/compare")
    def compare(bundle_id: str) -> Response:
        session = state.get(bundle_id)
        if session is None:
            return _not_found(f"unknown bundle id {bundle_id!r}")
        try:
            return cached(session, "compare", lambda: documents.compare_document(session.bundle))
        except EnsembleLensError as exc:
            return _error_response(exc)

    @app.get("/api/bundles/{bundle_id}/correlation")
    def correlation(bundle_id: str, method: str = "pearson") -> Response:
        session = state.get(bundle_id)
        if session is None:
            return _not_found(f"unknown bundle id {bundle_id!r}")
        try:
            return cached(session, f"correlation:{method}",
                          lambda: documents.correlation_document(session.bundle, method))
        except EnsembleLensError as exc:
            return _error_response(exc)

    @app.get("/api/bundles/{bundle_id}/compat")
    def compat(bundle_id: str, metric: str) -> Response:
        session = state.get(bundle_id)
        if session is None:
            return _not_found(f"unknown bundle id {bundle_id!r}")
        try:
            return cached(session, f"compat:{metric}",
                          lambda: documents.compat_matrix_document(session.bundle, metric))
        except EnsembleLensError as exc:
            return _error_response(exc)

    @app.get("/api/bundles/{bundle_id}/compat/pair/{a}/{b}")
    def compat_pair(bundle_id: str, a: str, b: str, bins: int = 10) -> Response:
        session = state.get(bundle_id)
        if session is None:
            return _not_found(f"unknown bundle id {bundle_id!r}")
        try:
            return cached(session, f"pair:{a}:{b}:{bins}",
                          lambda: documents.pair_detail_document(session.bundle, a, b, bins=bins))
        except EnsembleLensError as exc:
            return _error_response(exc)

    @app.post("/api/bundles/{bundle_id}/weights/evaluate")
    async def weights_evaluate(bundle_id: str, request: Request) -> Response:
        session = state.get(bundle_id)
        if session is None:
            return _not_found(f"unknown bundle id {bundle_id!r}")
        try:
            payload = json.loads(await request.body())
            weights = {str(k): float(v) for k, v in payload["weights"].items()}
        except (json.JSONDecodeError, KeyError, TypeError, ValueError, AttributeError):
            return _json_response({"error": {"code": "SchemaMismatch",
                                             "message": "body must be {\"weights\": {model_id: number}}"}}, 400)
        holdout = None
        holdout_id = payload.get("holdout_bundle_id")
        if holdout_id is not None:
            holdout_session = state.get(str(holdout_id))
            if holdout_session is None:
                return _not_found(f"unknown holdout bundle id {holdout_id!r}")
            holdout = holdout_session.bundle
        try:
            report = evaluate_weights(session.bundle, weights, holdout=holdout)
        except EnsembleLensError as exc:
            return _error_response(exc)
        return _json_response(documents.whatif_document(report))

    @app.post("/api/bundles/{bundle_id}/weights/suggest")
    async def weights_suggest(bundle_id: str, request: Request) -> Response:
        session = state.get(bundle_id)
        if session is None:
            return _not_found(f"unknown bundle id {bundle_id!r}")
        try:
            payload = json.loads(await request.body())
            objective = str(payload["objective"])
            budget = int(payload.get("budget", 500))
            seed = int(payload.get("seed", 0))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError, AttributeError):
            return _json_response({"error": {"code": "SchemaMismatch",
                                             "message": "body must carry 'objective' plus optional 'budget' and 'seed'"}}, 400)
        direction = payload.get("direction")
        maximize = None if direction is None else direction == "max"
        try:
            proposal = suggest_weights(session.bundle, objective, budget, seed=seed, maximize=maximize)
        except EnsembleLensError as exc:
            return _error_response(exc)
        return _json_response(documents.proposal_document(proposal))

    @app.get("/api/bundles/{bundle_id}/xai/importance")
    def xai_importance(bundle_id: str, model: str, repeats: int = 5, seed: int = 0,
                       metric: Optional[str] = None, normalize: bool = False) -> Response:
        session = state.get(bundle_id)
        if session is None:
            return _not_found(f"unknown bundle id {bundle_id!r}")

        def build():
            predictor = _session_predictor(session, model)
            session.xai_status = {"state": "running", "done": 0,
                                  "total": session.bundle.dataset.p}

            def on_progress(done: int, total: int) -> None:
                session.xai_status = {"state": "running", "done": done, "total": total}

            report = permutation_importance(predictor, session.bundle.dataset,
                                            metric=metric, repeats=repeats, seed=seed,
                                            model_id=model, normalize=normalize,
                                            progress=on_progress)
            session.xai_status = {"state": "done", "done": session.bundle.dataset.p,
                                  "total": session.bundle.dataset.p}
            return documents.importance_document(report)

        try:
            return cached(session, f"importance:{model}:{repeats}:{seed}:{metric}:{normalize}", build)
        except UnknownModel as exc:
            return _error_response(exc)
        except EnsembleLensError as exc:
            return _error_response(exc)

    @app.get("/api/bundles/{bundle_id}/xai/pdp")
    def xai_pdp(bundle_id: str, model: str, feature: str, grid: int = 20) -> Response:
        session = state.get(bundle_id)
        if session is None:
            return _not_found(f"unknown bundle id {bundle_id!r}")

        def build():
            predictor = _session_predictor(session, model)
            curve = partial_dependence(predictor, session.bundle.dataset, feature,
                                       grid_size=grid, model_id=model)
            return documents.pdp_document(curve)

        try:
            return cached(session, f"pdp:{model}:{feature}:{grid}", build)
        except EnsembleLensError as exc:
            return _error_response(exc)

    @app.get("/api/bundles/{bundle_id}/xai/status")
    def xai_status(bundle_id: str) -> Response:
        session = state.get(bundle_id)
        if session is None:
            return _not_found(f"unknown bundle id {bundle_id!r}")
        return _json_response(session.xai_status)

    return app
