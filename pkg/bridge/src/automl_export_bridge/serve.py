"""Serve a fitted model over the diagnostics engine's predictor protocol.

One JSON document per line on stdio, or the same payloads over HTTP
(``GET /describe``, ``POST /predict``). Requests that cannot be honored
produce error documents; the process stays alive. The endpoint declares
``concurrent: false``: the engine serializes its calls.

Module usage for subprocess transports::

    python -m automl_export_bridge.serve --pickle model.pkl --task regression
"""

from __future__ import annotations

import argparse
import json
import pickle
import sys
import threading
from typing import Optional, Sequence

import numpy as np

DEFAULT_BATCH_MAX = 10_000


def _label(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (np.floating, float)) and float(value).is_integer():
        return str(int(value))
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


class PredictorServer:
    """Protocol endpoint around one fitted model."""

    def __init__(self, model, task: str, classes: Optional[Sequence] = None,
                 batch_max: int = DEFAULT_BATCH_MAX):
        if task not in ("regression", "binary", "multiclass"):
            raise ValueError(f"unknown task {task!r}")
        self.model = model
        self.task = task
        self.batch_max = int(batch_max)
        self.classes = None
        if task != "regression":
            source = classes if classes is not None else getattr(model, "classes_", None)
            if source is None:
                raise ValueError("classification endpoints need class labels "
                                 "(classes argument or model.classes_)")
            self.classes = [_label(c) for c in source]
        self._httpd = None
        self._thread = None

    # -- protocol ------------------------------------------------------------

    def describe_document(self) -> dict:
        doc = {"task": self.task, "batch_max": self.batch_max, "concurrent": False}
        if self.classes is not None:
            doc["classes"] = self.classes
        return doc

    def handle(self, doc) -> dict:
        if not isinstance(doc, dict) or "op" not in doc:
            return {"id": doc.get("id") if isinstance(doc, dict) else None,
                    "error": {"code": "BadRequest",
                              "message": "request must be an object with an 'op'"}}
        rid = doc.get("id")
        if doc["op"] == "describe":
            return {"id": rid, **self.describe_document()}
        if doc["op"] != "predict":
            return {"id": rid, "error": {"code": "UnknownOp",
                                         "message": f"unknown op {doc['op']!r}"}}
        try:
            rows = doc["features"]
            if not isinstance(rows, list):
                raise TypeError("features must be a list of rows")
            if len(rows) > self.batch_max:
                raise ValueError(f"request exceeds batch_max={self.batch_max}")
            if not rows:
                return {"id": rid, "predictions": []}
            X = np.asarray(rows, dtype=float)
            if self.task == "regression":
                values = np.asarray(self.model.predict(X), dtype=float)
                return {"id": rid, "predictions": [float(v) for v in values]}
            proba_fn = getattr(self.model, "predict_proba", None)
            if proba_fn is not None:
                proba = np.asarray(proba_fn(X), dtype=float)
                return {"id": rid, "probabilities": [[float(v) for v in row] for row in proba]}
            labels = self.model.predict(X)
            return {"id": rid, "predictions": [_label(v) for v in labels]}
        except Exception as exc:
            return {"id": rid, "error": {"code": "PredictionFailed", "message": str(exc)}}

    # -- transports ------------------------------------------------------------

    def run_stdio(self) -> None:
        for line in sys.stdin:
            line = line.strip()
            if not line:
                continue
            try:
                doc = json.loads(line)
            except json.JSONDecodeError as exc:
                response = {"id": None, "error": {"code": "BadJson", "message": str(exc)}}
            else:
                response = self.handle(doc)
            sys.stdout.write(json.dumps(response) + "\n")
            sys.stdout.flush()

    def start_http(self, port: int = 0, host: str = "127.0.0.1") -> int:
        """Serve over HTTP in a background thread; returns the bound port."""
        from http.server import BaseHTTPRequestHandler, HTTPServer

        server = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *_):
                pass

            def _send(self, doc, status=200):
                body = json.dumps(doc).encode("utf-8")
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def do_GET(self):
                if self.path.rstrip("/").endswith("describe"):
                    self._send(server.describe_document())
                else:
                    self._send({"error": {"code": "NotFound", "message": self.path}}, 404)

            def do_POST(self):
                length = int(self.headers.get("Content-Length", 0))
                try:
                    doc = json.loads(self.rfile.read(length))
                except json.JSONDecodeError as exc:
                    self._send({"id": None, "error": {"code": "BadJson", "message": str(exc)}})
                    return
                self._send(server.handle(doc))

        self._httpd = HTTPServer((host, port), Handler)
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()
        return self._httpd.server_port

    def stop(self) -> None:
        if self._httpd is not None:
            self._httpd.shutdown()
            self._httpd.server_close()
            self._httpd = None


def serve_predictor(model, transport: str = "stdio", task: str = "regression",
                    classes: Optional[Sequence] = None, port: int = 0,
                    batch_max: int = DEFAULT_BATCH_MAX) -> PredictorServer:
    """Expose a fitted model over the wire protocol.

    ``stdio`` blocks serving the current process's stdin/stdout; ``http``
    starts a background server and returns immediately (port available as
    ``server._httpd.server_port`` via the returned object).
    """
    server = PredictorServer(model, task, classes=classes, batch_max=batch_max)
    if transport == "stdio":
        server.run_stdio()
    elif transport == "http":
        port = server.start_http(port)
        sys.stderr.write(f"bridge predictor listening on 127.0.0.1:{port}\n")
        sys.stderr.flush()
    else:
        raise ValueError(f"unknown transport {transport!r}")
    return server


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="automl-export-bridge-serve")
    parser.add_argument("--pickle", required=True, help="path to a pickled fitted model")
    parser.add_argument("--task", required=True,
                        choices=("regression", "binary", "multiclass"))
    parser.add_argument("--classes", help="comma-separated class labels")
    parser.add_argument("--transport", choices=("stdio", "http"), default="stdio")
    parser.add_argument("--port", type=int, default=0)
    parser.add_argument("--batch-max", type=int, default=DEFAULT_BATCH_MAX)
    args = parser.parse_args(argv)

    with open(args.pickle, "rb") as fh:
        model = pickle.load(fh)
    classes = args.classes.split(",") if args.classes else None
    server = serve_predictor(model, transport=args.transport, task=args.task,
                             classes=classes, port=args.port, batch_max=args.batch_max)
    if args.transport == "http":
        try:
            server._thread.join()
        except KeyboardInterrupt:
            server.stop()
    return 0


if __name__ == "__main__":
    sys.exit(main())
