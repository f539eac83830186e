"""Command-line access to every analysis, plus the service launcher.

JSON outputs are byte-identical to the HTTP service bodies for the same
inputs. Exit codes: 0 ok, 2 input/validation, 3 task mismatch, 4 predictor
unavailable, 5 environment. Data goes to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import os
import socket
import sys
from typing import Optional

from . import documents
from .bundle import load_bundle
from .errors import (
    CoefficientArityMismatch,
    EndpointError,
    EnsembleLensError,
    HandshakeTimeout,
    MalformedSpec,
    MethodTaskMismatch,
    MetricTaskMismatch,
    NonBinaryTask,
    NonClassificationTask,
    NonRegressionTask,
    PredictorUnavailable,
    ProtocolViolation,
)
from .weights import ensemble_predictor, evaluate_weights, suggest_weights
from .xai import partial_dependence, permutation_importance

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_TASK = 3
EXIT_PREDICTOR = 4
EXIT_ENV = 5

_TASK_ERRORS = (MetricTaskMismatch, MethodTaskMismatch, NonRegressionTask,
                NonClassificationTask, NonBinaryTask)
_PREDICTOR_ERRORS = (PredictorUnavailable, HandshakeTimeout, ProtocolViolation,
                     EndpointError, MalformedSpec, CoefficientArityMismatch)

LOOPBACK_HOSTS = {"127.0.0.1", "localhost", "::1"}


def _exit_code(exc: EnsembleLensError) -> int:
    if isinstance(exc, _TASK_ERRORS):
        return EXIT_TASK
    if isinstance(exc, _PREDICTOR_ERRORS):
        return EXIT_PREDICTOR
    return EXIT_INPUT


def _fail(exc: EnsembleLensError) -> int:
    report = getattr(exc, "report", None)
    if report is not None:
        sys.stderr.write(documents.dumps(documents.validation_document(report)))
    sys.stderr.write(f"error [{exc.code}]: {exc}\n")
    return _exit_code(exc)


def _emit(doc: dict, out: Optional[str]) -> None:
    text = documents.dumps(doc)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _round4(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, float):
        return f"{value:.4f}"
    return str(value)


def _table(headers: list[str], rows: list[list]) -> str:
    cells = [headers] + [[_round4(v) for v in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in cells]
    return "\n".join(lines) + "\n"


# -- subcommands -------------------------------------------------------------

def cmd_metrics(args) -> int:
    try:
        bundle = load_bundle(args.bundle)
        doc = documents.metrics_document(bundle)
    except EnsembleLensError as exc:
        return _fail(exc)
    if args.format == "json":
        _emit(doc, args.out)
        return EXIT_OK
    names = list(doc["reports"][0]["metrics"]) if doc["reports"] else []
    rows = [[r["model_id"]] + [r["metrics"][n] for n in names] for r in doc["reports"]]
    text = _table(["model"] + names, rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_compat(args) -> int:
    try:
        bundle = load_bundle(args.bundle)
        if args.pair:
            doc = documents.pair_detail_document(bundle, args.pair[0], args.pair[1], bins=args.bins)
        else:
            doc = documents.compat_matrix_document(bundle, args.metric)
    except EnsembleLensError as exc:
        return _fail(exc)
    if args.format == "table" and not args.pair:
        rows = [[mid] + row for mid, row in zip(doc["ids"], doc["values"])]
        text = _table([doc["metric"]] + doc["ids"], rows)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return EXIT_OK
    _emit(doc, args.out)
    return EXIT_OK


def _parse_weight_set(text: str) -> dict[str, float]:
    weights = {}
    for part in text.split(","):
        key, sep, value = part.partition("=")
        if not sep or not key.strip():
            raise ValueError(f"expected model=weight, got {part!r}")
        weights[key.strip()] = float(value)
    return weights


def cmd_weights_evaluate(args) -> int:
    try:
        weights = _parse_weight_set(args.set)
    except ValueError as exc:
        sys.stderr.write(f"error: malformed --set: {exc}\n"
                         "usage: --set m1=0.5,m2=0.5\n")
        return EXIT_INPUT
    try:
        bundle = load_bundle(args.bundle)
        holdout = load_bundle(args.holdout) if args.holdout else None
        report = evaluate_weights(bundle, weights, holdout=holdout)
    except EnsembleLensError as exc:
        return _fail(exc)
    _emit(documents.whatif_document(report), args.out)
    return EXIT_OK


def cmd_weights_suggest(args) -> int:
    try:
        bundle = load_bundle(args.bundle)
        proposal = suggest_weights(bundle, args.objective, args.budget, seed=args.seed)
    except EnsembleLensError as exc:
        return _fail(exc)
    _emit(documents.proposal_document(proposal), args.out)
    return EXIT_OK


def _resolve_predictor(bundle, model_id: str):
    from .bundle import ENSEMBLE_ID
    from .predictors import predictor_for_model

    if model_id == ENSEMBLE_ID:
        return ensemble_predictor(bundle)
    return predictor_for_model(bundle, bundle.model(model_id))


def cmd_xai_importance(args) -> int:
    try:
        bundle = load_bundle(args.bundle)
        predictor = _resolve_predictor(bundle, args.model)
        report = permutation_importance(predictor, bundle.dataset, metric=args.metric,
                                        repeats=args.repeats, seed=args.seed,
                                        model_id=args.model, normalize=args.normalize)
    except EnsembleLensError as exc:
        return _fail(exc)
    _emit(documents.importance_document(report), args.out)
    return EXIT_OK


def cmd_xai_pdp(args) -> int:
    try:
        bundle = load_bundle(args.bundle)
        predictor = _resolve_predictor(bundle, args.model)
        curve = partial_dependence(predictor, bundle.dataset, args.feature,
                                   grid_size=args.grid, model_id=args.model)
    except EnsembleLensError as exc:
        return _fail(exc)
    _emit(documents.pdp_document(curve), args.out)
    return EXIT_OK


def cmd_serve(args) -> int:
    if args.bind not in LOOPBACK_HOSTS and not args.allow_remote:
        sys.stderr.write(f"error: refusing to bind non-loopback address {args.bind!r} "
                         "without --allow-remote\n")
        return EXIT_ENV
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((args.bind if args.bind != "localhost" else "127.0.0.1", args.port))
    except OSError as exc:
        sys.stderr.write(f"error: cannot bind {args.bind}:{args.port}: {exc}\n")
        return EXIT_ENV
    finally:
        probe.close()

    import uvicorn

    from .service import ServiceConfig, create_app

    config = ServiceConfig(cache_mb=args.cache_mb,
                           spill_dir=os.environ.get("ENSEMBLE_LENS_CACHE_DIR"))
    app = create_app(config)
    uvicorn.run(app, host=args.bind, port=args.port, log_level="warning")
    return EXIT_OK


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ensemble-lens",
                                     description="Diagnostics for ensembles of predictive models.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("metrics", help="evaluation metrics per model and for the ensemble")
    p.add_argument("--bundle", required=True)
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_metrics)

    p = sub.add_parser("compat", help="pairwise compatimetric matrix or pair detail")
    p.add_argument("--bundle", required=True)
    p.add_argument("--metric", required=True)
    p.add_argument("--pair", nargs=2, metavar=("A", "B"))
    p.add_argument("--bins", type=int, default=10)
    p.add_argument("--format", choices=("table", "json"), default="json")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_compat)

    weights = sub.add_parser("weights", help="what-if evaluation and weight search")
    wsub = weights.add_subparsers(dest="weights_command", required=True)

    p = wsub.add_parser("evaluate", help="metrics of the ensemble under new weights")
    p.add_argument("--bundle", required=True)
    p.add_argument("--set", required=True, help="comma-separated model=weight pairs")
    p.add_argument("--holdout")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_weights_evaluate)

    p = wsub.add_parser("suggest", help="coordinate-ascent weight search")
    p.add_argument("--bundle", required=True)
    p.add_argument("--objective", required=True)
    p.add_argument("--budget", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_weights_suggest)

    xai = sub.add_parser("xai", help="permutation importance and partial dependence")
    xsub = xai.add_subparsers(dest="xai_command", required=True)

    p = xsub.add_parser("importance", help="permutation feature importance")
    p.add_argument("--bundle", required=True)
    p.add_argument("--model", required=True, help="model id or 'ensemble'")
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--metric")
    p.add_argument("--normalize", action="store_true",
                   help="add per-feature shares of the total positive drop")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_xai_importance)

    p = xsub.add_parser("pdp", help="partial dependence curve")
    p.add_argument("--bundle", required=True)
    p.add_argument("--model", required=True, help="model id or 'ensemble'")
    p.add_argument("--feature", required=True)
    p.add_argument("--grid", type=int, default=20)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_xai_pdp)

    p = sub.add_parser("serve", help="run the HTTP analysis service")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--bind", default="127.0.0.1")
    p.add_argument("--cache-mb", type=int, default=64)
    p.add_argument("--allow-remote", action="store_true")
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
