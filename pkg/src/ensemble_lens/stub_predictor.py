"""Reference predictor endpoint for protocol conformance work.

Serves a built-in model spec over the wire protocol, on stdio or HTTP.
Malformed requests produce error documents; the process stays alive.
``--misbehave`` modes deliberately violate the protocol so client-side
detection can be exercised.

Run as ``python -m ensemble_lens.stub_predictor --task regression
--spec '{"kind":"linear","intercept":1,"coefficients":{"x":2}}'``.
"""

from __future__ import annotations

import argparse
import json
import sys

from .bundle import TaskKind
from .predictors import load_builtin


def _describe_document(args) -> dict:
    doc = {"task": args.task, "batch_max": args.batch_max, "concurrent": False}
    if args.classes:
        doc["classes"] = args.classes.split(",")
    return doc


def _handle(doc, predictor, args) -> dict:
    if not isinstance(doc, dict) or "op" not in doc:
        return {"id": doc.get("id") if isinstance(doc, dict) else None,
                "error": {"code": "BadRequest", "message": "request must be an object with an 'op'"}}
    rid = doc.get("id")
    if args.misbehave == "wrong-id" and doc["op"] == "predict":
        rid = (rid or 0) + 1000
    if doc["op"] == "describe":
        return {"id": rid, **_describe_document(args)}
    if doc["op"] != "predict":
        return {"id": rid, "error": {"code": "UnknownOp", "message": f"unknown op {doc['op']!r}"}}
    try:
        rows = doc["features"]
        columns = doc["columns"]
        out = predictor._predict_batch(rows, columns)
    except Exception as exc:  # surface anything as an error document
        return {"id": rid, "error": {"code": "PredictionFailed", "message": str(exc)}}
    if args.misbehave == "short" and len(rows) > 0:
        if out.probabilities is not None:
            return {"id": rid, "probabilities": out.probabilities[:-1].tolist()}
        return {"id": rid, "predictions": list(out.values[:-1])}
    if out.probabilities is not None:
        return {"id": rid, "probabilities": out.probabilities.tolist()}
    values = out.values.tolist() if hasattr(out.values, "tolist") else list(out.values)
    return {"id": rid, "predictions": values}


def _serve_stdio(predictor, args) -> None:
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            response = {"id": None, "error": {"code": "BadJson", "message": str(exc)}}
        else:
            response = _handle(doc, predictor, args)
        sys.stdout.write(json.dumps(response) + "\n")
        sys.stdout.flush()


def _serve_http(predictor, args) -> None:
    from http.server import BaseHTTPRequestHandler, HTTPServer

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
            if self.path.rstrip("/").endswith("/describe") or self.path == "/describe":
                self._send(_describe_document(args))
            else:
                self._send({"error": {"code": "NotFound", "message": self.path}}, 404)

        def do_POST(self):
            length = int(self.headers.get("Content-Length", 0))
            raw = self.rfile.read(length)
            try:
                doc = json.loads(raw)
            except json.JSONDecodeError as exc:
                self._send({"id": None, "error": {"code": "BadJson", "message": str(exc)}})
                return
            self._send(_handle(doc, predictor, args))

    server = HTTPServer(("127.0.0.1", args.port), Handler)
    sys.stderr.write(f"stub predictor listening on 127.0.0.1:{server.server_port}\n")
    sys.stderr.flush()
    server.serve_forever()


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="stub-predictor")
    parser.add_argument("--task", required=True, choices=("regression", "binary", "multiclass"))
    parser.add_argument("--spec", required=True, help="built-in predictor spec as JSON")
    parser.add_argument("--classes", help="comma-separated class labels (classification)")
    parser.add_argument("--batch-max", type=int, default=10000)
    parser.add_argument("--transport", choices=("stdio", "http"), default="stdio")
    parser.add_argument("--port", type=int, default=0)
    parser.add_argument("--misbehave", choices=("short", "wrong-id"))
    args = parser.parse_args(argv)

    task = TaskKind(args.task)
    labels = args.classes.split(",") if args.classes else None
    predictor = load_builtin(json.loads(args.spec), task, class_labels=labels)
    if args.transport == "stdio":
        _serve_stdio(predictor, args)
    else:
        _serve_http(predictor, args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
