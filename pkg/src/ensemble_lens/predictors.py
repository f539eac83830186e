"""Predictor abstraction: built-in models for desk-scale work and a client
for external predictors speaking the line-delimited JSON wire protocol.

Wire protocol (one JSON document per line on subprocess stdio; identical
payloads over HTTP with ``GET /describe`` and ``POST /predict``):

* ``{"op": "describe", "id": 0}`` ->
  ``{"id": 0, "task": "regression|binary|multiclass", "classes": [...]?,
    "batch_max": int, "concurrent": bool}``
* ``{"op": "predict", "id": k, "features": [[...], ...], "columns": [...]}`` ->
  ``{"id": k, "predictions": [...]}`` or ``{"id": k, "probabilities": [[...], ...]}``
* errors: ``{"id": k, "error": {"code": str, "message": str}}``

Request ids increase monotonically so responses pair with requests.
"""

from __future__ import annotations

import json
import math
import queue
import shlex
import subprocess
import threading
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .bundle import EnsembleBundle, ModelEntry, TaskKind
from .errors import (
    CoefficientArityMismatch,
    EndpointError,
    HandshakeTimeout,
    MalformedSpec,
    MissingProbabilities,
    ProtocolViolation,
    SchemaMismatch,
)

DEFAULT_BATCH_MAX = 10_000
PROTOCOL_PROBABILITY_TOL = 1e-9


@dataclass
class Prediction:
    values: np.ndarray
    probabilities: Optional[np.ndarray] = None


class Predictor:
    """Base: task metadata plus a batched row-to-prediction mapping."""

    task: TaskKind
    class_labels: Optional[tuple[str, ...]] = None
    batch_max: int = DEFAULT_BATCH_MAX
    concurrent: bool = True

    def predict(self, rows: Sequence[Sequence], columns: Sequence[str],
                chunk_size: Optional[int] = None) -> Prediction:
        return predict(self, rows, columns, chunk_size=chunk_size)

    def _predict_batch(self, rows, columns) -> Prediction:  # pragma: no cover - abstract
        raise NotImplementedError

    def close(self) -> None:
        pass


def predict(predictor: Predictor, rows: Sequence[Sequence], columns: Sequence[str],
            chunk_size: Optional[int] = None) -> Prediction:
    """Order-preserving prediction over rows, chunked to the endpoint's
    batch limit; results are independent of the chunk size."""
    limit = predictor.batch_max if chunk_size is None else min(chunk_size, predictor.batch_max)
    if limit < 1:
        raise ProtocolViolation(f"batch limit must be positive, got {limit}")
    rows = list(rows)
    if not rows:
        values = np.empty(0, dtype=float if predictor.task is TaskKind.REGRESSION else object)
        return Prediction(values=values)
    parts = [predictor._predict_batch(rows[i:i + limit], columns) for i in range(0, len(rows), limit)]
    values = np.concatenate([p.values for p in parts])
    probs = None
    if parts[0].probabilities is not None:
        probs = np.concatenate([p.probabilities for p in parts], axis=0)
    return Prediction(values=values, probabilities=probs)


# ---------------------------------------------------------------------------
# built-in predictors

def _column_index(columns, needed) -> dict[str, int]:
    index = {name: i for i, name in enumerate(columns)}
    missing = [f for f in needed if f not in index]
    if missing:
        raise SchemaMismatch(f"feature rows lack columns {missing}")
    return index


def _numeric(cell, feature) -> float:
    try:
        return float(cell)
    except (TypeError, ValueError):
        raise SchemaMismatch(f"feature {feature!r} cell {cell!r} is not numeric") from None


class LinearPredictor(Predictor):
    def __init__(self, intercept: float, coefficients: dict[str, float]):
        self.task = TaskKind.REGRESSION
        self.intercept = float(intercept)
        self.coefficients = {str(k): float(v) for k, v in coefficients.items()}

    def _predict_batch(self, rows, columns) -> Prediction:
        index = _column_index(columns, self.coefficients)
        out = np.empty(len(rows), dtype=float)
        for i, row in enumerate(rows):
            out[i] = self.intercept + sum(
                c * _numeric(row[index[f]], f) for f, c in self.coefficients.items())
        return Prediction(values=out)


class LogisticPredictor(Predictor):
    """Sigmoid of one score (binary) or softmax of per-class scores."""

    def __init__(self, task: TaskKind, class_labels: Sequence[str],
                 intercepts: Sequence[float], coefficients: Sequence[dict[str, float]]):
        if task is TaskKind.REGRESSION:
            raise MalformedSpec("logistic predictors are classification-only")
        self.task = task
        self.class_labels = tuple(str(c) for c in class_labels)
        self.intercepts = [float(b) for b in intercepts]
        self.coefficients = [{str(k): float(v) for k, v in c.items()} for c in coefficients]
        expected = 1 if task is TaskKind.BINARY else len(self.class_labels)
        if len(self.intercepts) != expected or len(self.coefficients) != expected:
            raise CoefficientArityMismatch(
                f"{task.value} logistic spec needs {expected} score function(s), "
                f"got {len(self.coefficients)}")

    def _scores(self, rows, columns) -> np.ndarray:
        needed = {f for c in self.coefficients for f in c}
        index = _column_index(columns, needed)
        out = np.empty((len(rows), len(self.coefficients)), dtype=float)
        for i, row in enumerate(rows):
            for s, (b, coefs) in enumerate(zip(self.intercepts, self.coefficients)):
                out[i, s] = b + sum(c * _numeric(row[index[f]], f) for f, c in coefs.items())
        return out

    def _predict_batch(self, rows, columns) -> Prediction:
        scores = self._scores(rows, columns)
        if self.task is TaskKind.BINARY:
            pos = 1.0 / (1.0 + np.exp(-scores[:, 0]))
            probs = np.column_stack([1.0 - pos, pos])
        else:
            shifted = scores - scores.max(axis=1, keepdims=True)
            e = np.exp(shifted)
            probs = e / e.sum(axis=1, keepdims=True)
        idx = np.argmax(probs, axis=1)
        labels = np.asarray(self.class_labels, dtype=object)
        return Prediction(values=labels[idx], probabilities=probs)


class TreePredictor(Predictor):
    """Root-to-leaf routing; numeric splits go left when x <= threshold,
    categorical splits go left when x is in the node's level set."""

    def __init__(self, task: TaskKind, nodes: Sequence[dict], root: int = 0,
                 class_labels: Optional[Sequence[str]] = None):
        self.task = task
        self.class_labels = tuple(str(c) for c in class_labels) if class_labels else None
        self.nodes = list(nodes)
        self.root = int(root)
        self._validate()

    def _validate(self) -> None:
        if not self.nodes or not 0 <= self.root < len(self.nodes):
            raise MalformedSpec("tree spec needs a node list with a valid root index")
        # every path must reach a leaf without revisiting a node
        stack = [(self.root, frozenset())]
        while stack:
            i, seen = stack.pop()
            if not 0 <= i < len(self.nodes):
                raise MalformedSpec(f"tree node index {i} is out of range")
            if i in seen:
                raise MalformedSpec(f"tree contains a cycle through node {i}")
            node = self.nodes[i]
            if "value" in node or "probabilities" in node:
                continue
            if "feature" not in node or "left" not in node or "right" not in node:
                raise MalformedSpec(f"tree node {i} is neither a leaf nor a complete split")
            if "threshold" not in node and "levels" not in node:
                raise MalformedSpec(f"tree split node {i} needs a threshold or a level set")
            stack.append((int(node["left"]), seen | {i}))
            stack.append((int(node["right"]), seen | {i}))

    def _route(self, row, index) -> dict:
        i = self.root
        while True:
            node = self.nodes[i]
            if "value" in node or "probabilities" in node:
                return node
            cell = row[index[node["feature"]]]
            if "threshold" in node:
                go_left = _numeric(cell, node["feature"]) <= float(node["threshold"])
            else:
                go_left = str(cell) in {str(v) for v in node["levels"]}
            i = int(node["left"] if go_left else node["right"])

    def _predict_batch(self, rows, columns) -> Prediction:
        features = {n["feature"] for n in self.nodes if "feature" in n}
        index = _column_index(columns, features)
        if self.task is TaskKind.REGRESSION:
            out = np.empty(len(rows), dtype=float)
            for i, row in enumerate(rows):
                leaf = self._route(row, index)
                if "value" not in leaf:
                    raise MalformedSpec("regression tree leaves need a 'value'")
                out[i] = float(leaf["value"])
            return Prediction(values=out)
        if not self.class_labels:
            raise MalformedSpec("classification trees need class labels")
        probs = np.empty((len(rows), len(self.class_labels)), dtype=float)
        for i, row in enumerate(rows):
            leaf = self._route(row, index)
            if "probabilities" not in leaf:
                raise MalformedSpec("classification tree leaves need 'probabilities'")
            p = np.asarray(leaf["probabilities"], dtype=float)
            if p.shape != (len(self.class_labels),):
                raise MalformedSpec("leaf probability arity does not match the class labels")
            probs[i] = p
        idx = np.argmax(probs, axis=1)
        labels = np.asarray(self.class_labels, dtype=object)
        return Prediction(values=labels[idx], probabilities=probs)


def load_builtin(spec: dict, task: TaskKind,
                 class_labels: Optional[Sequence[str]] = None,
                 feature_names: Optional[Sequence[str]] = None) -> Predictor:
    """Build a deterministic in-process predictor from its JSON spec."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise MalformedSpec(f"predictor spec must be an object with a 'kind', got {spec!r}")
    kind = spec["kind"]
    if kind == "linear":
        if task is not TaskKind.REGRESSION:
            raise MalformedSpec("linear predictors are regression-only; use 'logistic'")
        coefs = spec.get("coefficients")
        if not isinstance(coefs, dict):
            raise MalformedSpec("linear spec needs a 'coefficients' object keyed by feature name")
        p = LinearPredictor(spec.get("intercept", 0.0), coefs)
    elif kind == "logistic":
        if class_labels is None:
            raise MalformedSpec("logistic predictors need the bundle's class labels")
        if task is TaskKind.BINARY:
            coefs = spec.get("coefficients")
            if not isinstance(coefs, dict):
                raise MalformedSpec("binary logistic spec needs a 'coefficients' object")
            p = LogisticPredictor(task, class_labels, [spec.get("intercept", 0.0)], [coefs])
        else:
            p = LogisticPredictor(task, class_labels,
                                  spec.get("intercepts", []), spec.get("coefficients", []))
    elif kind == "tree":
        p = TreePredictor(task, spec.get("nodes", []), spec.get("root", 0), class_labels)
    else:
        raise MalformedSpec(f"unknown builtin predictor kind {kind!r}")

    if feature_names is not None and kind in ("linear", "logistic"):
        known = set(feature_names)
        used = set()
        if kind == "linear":
            used = set(p.coefficients)
        else:
            used = {f for c in p.coefficients for f in c}
        unknown = sorted(used - known)
        if unknown:
            raise CoefficientArityMismatch(f"coefficients name unknown features {unknown}")
    return p


class CompositePredictor(Predictor):
    """Weighted recombination of member predictors (the ensemble as a
    predictor): weighted mean of values (regression) or of probability
    rows with an argmax decision (classification)."""

    def __init__(self, task: TaskKind, parts: Sequence[tuple[Predictor, float]],
                 class_labels: Optional[Sequence[str]] = None):
        self.task = task
        self.class_labels = tuple(str(c) for c in class_labels) if class_labels else None
        self.parts = list(parts)
        self.batch_max = min(p.batch_max for p, _ in self.parts)
        self.concurrent = all(p.concurrent for p, _ in self.parts)

    def _predict_batch(self, rows, columns) -> Prediction:
        if self.task is TaskKind.REGRESSION:
            total = np.zeros(len(rows), dtype=float)
            for p, w in self.parts:
                total += w * np.asarray(p._predict_batch(rows, columns).values, dtype=float)
            return Prediction(values=total)
        total = None
        for p, w in self.parts:
            part = p._predict_batch(rows, columns)
            if part.probabilities is None:
                raise MissingProbabilities("composite classification needs member probabilities")
            total = w * part.probabilities if total is None else total + w * part.probabilities
        idx = np.argmax(total, axis=1)
        labels = np.asarray(self.class_labels, dtype=object)
        return Prediction(values=labels[idx], probabilities=total)

    def close(self) -> None:
        for p, _ in self.parts:
            p.close()


# ---------------------------------------------------------------------------
# external predictors

class _Transport:
    def request(self, payload: dict, timeout: float) -> dict:  # pragma: no cover - interface
        raise NotImplementedError

    def close(self) -> None:
        pass


class _SubprocessTransport(_Transport):
    """Line-delimited JSON over a child process's stdio."""

    def __init__(self, command):
        if isinstance(command, str):
            command = shlex.split(command)
        self.proc = subprocess.Popen(command, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                                     stderr=subprocess.DEVNULL, text=True, bufsize=1)
        self._lines: queue.Queue = queue.Queue()
        self._reader = threading.Thread(target=self._pump, daemon=True)
        self._reader.start()

    def _pump(self) -> None:
        assert self.proc.stdout is not None
        for line in self.proc.stdout:
            self._lines.put(line)
        self._lines.put(None)

    def request(self, payload: dict, timeout: float) -> dict:
        try:
            self.proc.stdin.write(json.dumps(payload) + "\n")
            self.proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise HandshakeTimeout(f"predictor process is not accepting requests: {exc}") from exc
        try:
            line = self._lines.get(timeout=timeout)
        except queue.Empty:
            raise HandshakeTimeout(f"no response within {timeout} s") from None
        if line is None:
            raise HandshakeTimeout("predictor process closed its output stream")
        try:
            doc = json.loads(line)
        except json.JSONDecodeError:
            raise ProtocolViolation(f"response is not JSON: {line[:200]!r}") from None
        if not isinstance(doc, dict):
            raise ProtocolViolation(f"response is not an object: {line[:200]!r}")
        return doc

    def close(self) -> None:
        try:
            if self.proc.stdin:
                self.proc.stdin.close()
            self.proc.terminate()
            self.proc.wait(timeout=5)
        except Exception:
            self.proc.kill()


class _HttpTransport(_Transport):
    def __init__(self, base_url: str):
        import httpx

        self.base_url = base_url.rstrip("/")
        self.client = httpx.Client(timeout=None)

    def request(self, payload: dict, timeout: float) -> dict:
        import httpx

        try:
            if payload.get("op") == "describe":
                resp = self.client.get(f"{self.base_url}/describe", timeout=timeout)
            else:
                resp = self.client.post(f"{self.base_url}/predict", json=payload, timeout=timeout)
        except httpx.TimeoutException:
            raise HandshakeTimeout(f"no response within {timeout} s") from None
        except httpx.HTTPError as exc:
            raise HandshakeTimeout(f"endpoint unreachable: {exc}") from exc
        try:
            doc = resp.json()
        except ValueError:
            raise ProtocolViolation(f"response is not JSON: {resp.text[:200]!r}") from None
        if payload.get("op") == "describe" and "id" not in doc:
            doc = {"id": payload["id"], **doc}
        return doc

    def close(self) -> None:
        self.client.close()


class ExternalPredictor(Predictor):
    """Client for a describe/predict endpoint; honors the endpoint's batch
    limit and serializes requests unless the endpoint declared itself
    concurrent-safe."""

    def __init__(self, transport: _Transport, timeout: float = 10.0):
        self._transport = transport
        self._timeout = timeout
        self._next_id = 0
        self._id_lock = threading.Lock()
        self._gate = threading.Lock()
        described = self._request({"op": "describe"})
        try:
            self.task = TaskKind(described["task"])
        except (KeyError, ValueError):
            raise ProtocolViolation(f"describe document lacks a valid task: {described!r}") from None
        classes = described.get("classes")
        self.class_labels = tuple(str(c) for c in classes) if classes else None
        if self.task.is_classification and not self.class_labels:
            raise ProtocolViolation("classification endpoints must describe their classes")
        self.batch_max = int(described.get("batch_max", DEFAULT_BATCH_MAX))
        self.concurrent = bool(described.get("concurrent", False))

    def _request(self, payload: dict) -> dict:
        with self._id_lock:
            payload = {**payload, "id": self._next_id}
            self._next_id += 1
        doc = self._transport.request(payload, self._timeout)
        if "error" in doc:
            err = doc["error"] or {}
            raise EndpointError(str(err.get("message", "endpoint error")),
                                endpoint_code=str(err.get("code", "")))
        if doc.get("id") != payload["id"]:
            raise ProtocolViolation(
                f"response id {doc.get('id')!r} does not match request id {payload['id']}")
        return doc

    def _predict_batch(self, rows, columns) -> Prediction:
        payload = {"op": "predict",
                   "features": [[_wire_cell(c) for c in row] for row in rows],
                   "columns": list(columns)}
        gate = self._gate if not self.concurrent else None
        if gate:
            gate.acquire()
        try:
            doc = self._request(payload)
        finally:
            if gate:
                gate.release()

        if "probabilities" in doc:
            probs = np.asarray(doc["probabilities"], dtype=float)
            if probs.ndim != 2 or probs.shape[0] != len(rows):
                raise ProtocolViolation(
                    f"endpoint returned {probs.shape[0] if probs.ndim else 0} probability rows "
                    f"for {len(rows)} feature rows")
            if self.class_labels and probs.shape[1] != len(self.class_labels):
                raise ProtocolViolation("probability row arity does not match described classes")
            if probs.size and np.abs(probs.sum(axis=1) - 1.0).max() > PROTOCOL_PROBABILITY_TOL:
                raise ProtocolViolation("endpoint probability rows are not row-stochastic")
            idx = np.argmax(probs, axis=1)
            labels = np.asarray(self.class_labels, dtype=object)
            return Prediction(values=labels[idx], probabilities=probs)
        if "predictions" in doc:
            preds = doc["predictions"]
            if len(preds) != len(rows):
                raise ProtocolViolation(
                    f"endpoint returned {len(preds)} predictions for {len(rows)} rows")
            if self.task is TaskKind.REGRESSION:
                values = np.asarray([float(v) for v in preds], dtype=float)
                if values.size and not np.all(np.isfinite(values)):
                    raise ProtocolViolation("endpoint returned non-finite predictions")
            else:
                values = np.asarray([str(v) for v in preds], dtype=object)
            return Prediction(values=values)
        raise ProtocolViolation(f"response carries neither predictions nor probabilities: "
                                f"{json.dumps(doc)[:200]!r}")

    def close(self) -> None:
        self._transport.close()


def _wire_cell(cell):
    if isinstance(cell, (np.floating, float)):
        v = float(cell)
        if not math.isfinite(v):
            raise SchemaMismatch("feature cells on the wire must be finite")
        return v
    if isinstance(cell, (np.integer, int)):
        return int(cell)
    return str(cell)


def connect_external(ref, timeout: float = 10.0) -> ExternalPredictor:
    """Handshake with an external predictor endpoint.

    ``ref`` is ``{"command": [...]}`` / ``{"command": "..."}`` for a
    subprocess, ``{"url": "http://..."}`` or a bare URL string for HTTP.
    """
    if isinstance(ref, str):
        ref = {"url": ref} if ref.startswith(("http://", "https://")) else {"command": ref}
    if "command" in ref:
        transport: _Transport = _SubprocessTransport(ref["command"])
    elif "url" in ref:
        transport = _HttpTransport(ref["url"])
    else:
        raise MalformedSpec(f"external predictor reference needs 'command' or 'url': {ref!r}")
    try:
        return ExternalPredictor(transport, timeout=timeout)
    except Exception:
        transport.close()
        raise


def predictor_for_model(bundle: EnsembleBundle, model: ModelEntry,
                        timeout: float = 10.0) -> Predictor:
    """Materialize the predictor a model entry references."""
    from .errors import PredictorUnavailable

    ref = model.predictor_ref
    if not ref:
        raise PredictorUnavailable(f"model {model.id!r} has no predictor reference",
                                   models=[model.id])
    if ref.get("kind") == "external" or "command" in ref or "url" in ref:
        return connect_external({k: v for k, v in ref.items() if k != "kind"}, timeout=timeout)
    return load_builtin(ref, bundle.task, class_labels=bundle.class_labels,
                        feature_names=bundle.dataset.feature_names)


# ---------------------------------------------------------------------------
# conformance

def run_conformance(predictor: Predictor, rows: Sequence[Sequence],
                    columns: Sequence[str]) -> dict:
    """Exercise an endpoint against the protocol contract.

    Checks describe stability, empty requests, chunking transparency
    (results independent of the chunk size), and that error documents are
    surfaced as ``EndpointError`` without killing the endpoint. Raises on
    violations; returns a summary of what was observed.
    """
    rows = list(rows)
    if len(rows) < 3:
        raise ValueError("conformance needs at least 3 feature rows")

    empty = predict(predictor, [], columns)
    if len(empty.values) != 0:
        raise ProtocolViolation("empty request must yield an empty prediction")

    whole = predict(predictor, rows, columns)
    by_one = predict(predictor, rows, columns, chunk_size=1)
    by_two = predict(predictor, rows, columns, chunk_size=2)
    for other in (by_one, by_two):
        if list(whole.values) != list(other.values):
            raise ProtocolViolation("predictions depend on the chunk size")
        if (whole.probabilities is None) != (other.probabilities is None):
            raise ProtocolViolation("probability presence depends on the chunk size")
        if whole.probabilities is not None and not np.array_equal(whole.probabilities,
                                                                  other.probabilities):
            raise ProtocolViolation("probabilities depend on the chunk size")

    error_seen = False
    try:
        predict(predictor, [["__conformance_poison__"] * len(columns)], columns)
    except EndpointError:
        error_seen = True
    except SchemaMismatch:
        error_seen = True  # built-ins reject locally rather than over the wire
    # endpoint must still answer after an error document
    again = predict(predictor, rows, columns)
    if list(again.values) != list(whole.values):
        raise ProtocolViolation("endpoint responses changed after an error document")
    return {"rows": len(rows), "error_document_seen": error_seen,
            "batch_max": predictor.batch_max, "concurrent": predictor.concurrent}
