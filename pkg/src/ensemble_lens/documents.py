"""Canonical JSON documents for every analysis.

The CLI and the HTTP service both emit exactly these documents through
``dumps``, which is what makes their outputs byte-identical: one builder
per analysis, floats in shortest round-trip decimal form, compact
separators, insertion-ordered keys, and a trailing newline.
"""

from __future__ import annotations

import json
from typing import Optional

import numpy as np

from .bundle import EnsembleBundle, TaskKind, ValidationReport, target_std
from .compatimetrics import available_pair_metrics, pair_detail, pair_matrix
from .metrics import (
    metrics_table,
    prediction_compare_matrix,
    prediction_correlation_matrix,
)
from .weights import WeightProposal, WhatIfReport
from .xai import ImportanceReport, PDPCurve


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    return value


def dumps(doc) -> str:
    """Canonical JSON text: compact, shortest round-trip floats, newline-terminated."""
    return json.dumps(_jsonable(doc), separators=(",", ":"), allow_nan=False) + "\n"


# -- document builders -------------------------------------------------------

def validation_document(report: ValidationReport) -> dict:
    return report.to_document()


def summary_document(bundle: EnsembleBundle) -> dict:
    has_probabilities = bundle.has_probabilities()
    weights_lab = bundle.task is TaskKind.REGRESSION or has_probabilities
    doc = {
        "task": bundle.task.value,
        "n": bundle.n,
        "m": len(bundle.models),
        "target_column": bundle.target_column,
        "features": [
            {"name": name, "kind": bundle.dataset.meta(name).kind,
             **({"levels": list(bundle.dataset.meta(name).levels)}
                if bundle.dataset.meta(name).kind == "categorical" else {})}
            for name in bundle.dataset.feature_names
        ],
        "models": [
            {"id": m.id, "name": m.name, "weight": m.weight,
             "has_probabilities": m.probabilities is not None,
             "has_predictor": bool(m.predictor_ref)}
            for m in bundle.models
        ],
        "analyses": {
            "metrics": True,
            "compatimetrics": True,
            "weights_lab": weights_lab,
            "xai": any(m.predictor_ref for m in bundle.models),
        },
        "compat_metrics": list(available_pair_metrics(bundle.task)),
    }
    if bundle.class_labels is not None:
        doc["class_labels"] = list(bundle.class_labels)
        positive = bundle.resolved_positive_label()
        if positive is not None:
            doc["positive_label"] = positive
    if bundle.task is TaskKind.REGRESSION:
        doc["target_std"] = target_std(bundle.dataset)
    return doc


def metrics_document(bundle: EnsembleBundle) -> dict:
    return {"reports": [r.to_document() for r in metrics_table(bundle)]}


def compare_document(bundle: EnsembleBundle) -> dict:
    return prediction_compare_matrix(bundle).to_document()


def correlation_document(bundle: EnsembleBundle, method: str) -> dict:
    doc = prediction_correlation_matrix(bundle, method).to_document()
    if method == "kappa":
        doc["label"] = "prediction agreement (kappa)"
    return doc


def compat_matrix_document(bundle: EnsembleBundle, metric: str) -> dict:
    return pair_matrix(bundle, metric).to_document()


def pair_detail_document(bundle: EnsembleBundle, a: str, b: str, bins: int = 10) -> dict:
    return pair_detail(bundle, a, b, bins=bins)


def whatif_document(report: WhatIfReport) -> dict:
    return report.to_document()


def proposal_document(proposal: WeightProposal) -> dict:
    return proposal.to_document()


def importance_document(report: ImportanceReport) -> dict:
    return report.to_document()


def pdp_document(curve: PDPCurve) -> dict:
    return curve.to_document()
