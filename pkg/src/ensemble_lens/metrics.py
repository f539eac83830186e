"""Evaluation metrics for component models and the ensemble.

Regression reports carry MSE, RMSE, MAE, MAPE, R2; classification reports
carry accuracy, precision, recall, f1. Metrics that are undefined on the
given data (MAPE with zero targets, R2 with constant targets) are reported
as ``None`` together with a warning, never dropped silently.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .bundle import ENSEMBLE_ID, EnsembleBundle, TaskKind, target_std
from .errors import LengthMismatch, MethodTaskMismatch, UnknownLabel

REGRESSION_METRIC_NAMES = ("MSE", "RMSE", "MAE", "MAPE", "R2")
CLASSIFICATION_METRIC_NAMES = ("accuracy", "precision", "recall", "f1")

# metric name -> True when larger values are better
METRIC_DIRECTIONS = {
    "MSE": False, "RMSE": False, "MAE": False, "MAPE": False, "R2": True,
    "accuracy": True, "precision": True, "recall": True, "f1": True,
}


@dataclass
class MetricReport:
    model_id: str
    metrics: dict[str, Optional[float]]
    warnings: list[str] = field(default_factory=list)

    def to_document(self) -> dict:
        return {"model_id": self.model_id, "metrics": dict(self.metrics), "warnings": list(self.warnings)}


@dataclass
class PairMatrix:
    """m-by-m matrix of a pairwise statistic across model predictions."""

    metric_name: str
    model_ids: list[str]
    values: list[list[Optional[float]]]
    symmetric: bool

    def cell(self, a: str, b: str) -> Optional[float]:
        return self.values[self.model_ids.index(a)][self.model_ids.index(b)]

    def to_document(self) -> dict:
        return {"metric": self.metric_name, "ids": list(self.model_ids),
                "values": [list(row) for row in self.values], "symmetric": self.symmetric}


@dataclass
class CompareMatrix:
    """Per-model, per-observation comparison against the true target."""

    task: TaskKind
    model_ids: list[str]
    y: list
    raw: Optional[list[list[float]]] = None      # regression: prediction - truth
    scaled: Optional[list[list[float]]] = None   # raw / SD(y); None when SD(y)=0
    labels: Optional[list[list[str]]] = None     # classification: predicted labels
    correct: Optional[list[list[bool]]] = None

    def to_document(self) -> dict:
        doc = {"task": self.task.value, "ids": list(self.model_ids), "y": list(self.y)}
        if self.task is TaskKind.REGRESSION:
            doc["raw"] = self.raw
            doc["scaled"] = self.scaled
        else:
            doc["labels"] = self.labels
            doc["correct"] = self.correct
        return doc


def _as_float(v) -> np.ndarray:
    return np.asarray(v, dtype=float)


def regression_metrics(pred, y, model_id: str = "") -> MetricReport:
    """MSE, RMSE, MAE, MAPE (as a fraction), and R2 of one prediction vector."""
    pred, y = _as_float(pred), _as_float(y)
    if pred.shape != y.shape:
        raise LengthMismatch(f"prediction length {pred.shape} does not match target length {y.shape}")
    warnings: list[str] = []
    err = pred - y
    mse = float(np.mean(err ** 2))
    metrics: dict[str, Optional[float]] = {
        "MSE": mse,
        "RMSE": float(np.sqrt(mse)),
        "MAE": float(np.mean(np.abs(err))),
    }
    if np.any(y == 0):
        metrics["MAPE"] = None
        warnings.append("ZeroTargetForMAPE")
    else:
        metrics["MAPE"] = float(np.mean(np.abs(err) / np.abs(y)))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    if ss_tot == 0.0:
        metrics["R2"] = None
        warnings.append("DegenerateR2")
    else:
        metrics["R2"] = 1.0 - float(np.sum(err ** 2)) / ss_tot
    return MetricReport(model_id, metrics, warnings)


def _binary_counts(pred, y, positive) -> tuple[int, int, int, int]:
    pred, y = np.asarray(pred, dtype=object), np.asarray(y, dtype=object)
    pp = pred == positive
    ap = y == positive
    tp = int(np.sum(pp & ap))
    fp = int(np.sum(pp & ~ap))
    fn = int(np.sum(~pp & ap))
    tn = int(np.sum(~pp & ~ap))
    return tp, fp, fn, tn


def _ratio(num: int, den: int, complement_errors: int, warnings: list[str], what: str):
    """num/den with the vacuous-perfect convention.

    A denominator of zero means the class produced no candidates; the score
    is 1 when the complementary error count is also zero (nothing to get
    wrong), else 0. Either way a warning records the fallback.
    """
    if den > 0:
        return num / den
    warnings.append(f"ZeroDivision:{what}")
    return 1.0 if complement_errors == 0 else 0.0


def classification_metrics(pred, y, task: TaskKind,
                           class_labels: Optional[Sequence] = None,
                           positive_label=None,
                           model_id: str = "") -> MetricReport:
    """Accuracy plus precision/recall/F1.

    Binary scores are computed on the designated positive class (second
    entry of ``class_labels`` unless overridden); multiclass scores are
    macro-averaged over the labels observed in ``y`` or predictions.
    """
    pred = np.asarray(pred, dtype=object)
    y = np.asarray(y, dtype=object)
    if pred.shape != y.shape:
        raise LengthMismatch(f"prediction length {len(pred)} does not match target length {len(y)}")
    if class_labels is not None:
        valid = set(class_labels)
        for v in np.concatenate([pred, y]):
            if v not in valid:
                raise UnknownLabel(f"label {v!r} is not one of the declared class labels")
    warnings: list[str] = []
    accuracy = float(np.mean(pred == y)) if len(y) else 0.0

    if task is TaskKind.BINARY:
        if positive_label is None:
            pool = list(class_labels) if class_labels is not None else sorted({*pred.tolist(), *y.tolist()}, key=str)
            positive_label = pool[1] if len(pool) > 1 else pool[0]
        tp, fp, fn, tn = _binary_counts(pred, y, positive_label)
        precision = _ratio(tp, tp + fp, fn, warnings, "precision")
        recall = _ratio(tp, tp + fn, fp, warnings, "recall")
    else:
        observed = {*pred.tolist(), *y.tolist()}
        if class_labels is not None:
            pool = [c for c in class_labels if c in observed]
        else:
            pool = sorted(observed, key=str)
        precisions, recalls = [], []
        for c in pool:
            tp, fp, fn, _ = _binary_counts(pred, y, c)
            precisions.append(_ratio(tp, tp + fp, fn, warnings, f"precision[{c}]"))
            recalls.append(_ratio(tp, tp + fn, fp, warnings, f"recall[{c}]"))
        precision = float(np.mean(precisions)) if precisions else 0.0
        recall = float(np.mean(recalls)) if recalls else 0.0

    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    metrics = {"accuracy": accuracy, "precision": float(precision), "recall": float(recall), "f1": float(f1)}
    return MetricReport(model_id, metrics, warnings)


def score_predictions(pred, bundle: EnsembleBundle, model_id: str = "") -> MetricReport:
    """Task-appropriate metric report of one prediction vector on a bundle."""
    if bundle.task is TaskKind.REGRESSION:
        return regression_metrics(pred, bundle.dataset.target, model_id=model_id)
    return classification_metrics(pred, bundle.dataset.target, bundle.task,
                                  class_labels=bundle.class_labels,
                                  positive_label=bundle.resolved_positive_label(),
                                  model_id=model_id)


def ensemble_prediction_vector(bundle: EnsembleBundle) -> Optional[np.ndarray]:
    """Stored ensemble prediction, else the weighted recombination; None when
    a probability-free classification bundle has nothing stored."""
    if bundle.ensemble_prediction is not None:
        return bundle.ensemble_prediction
    from .weights import ensemble_predict  # deferred: weights imports metrics
    from .errors import MissingProbabilities
    try:
        pred, _ = ensemble_predict(bundle, bundle.weights())
    except MissingProbabilities:
        return None
    return pred


def metrics_table(bundle: EnsembleBundle) -> list[MetricReport]:
    """One report per component model plus the ensemble, ensemble first.

    The ensemble entry is omitted when a classification bundle stores no
    ensemble prediction and lacks the probabilities to recompute one.
    """
    reports = []
    ensemble = ensemble_prediction_vector(bundle)
    if ensemble is not None:
        reports.append(score_predictions(ensemble, bundle, model_id=ENSEMBLE_ID))
    for m in bundle.models:
        reports.append(score_predictions(m.predictions, bundle, model_id=m.id))
    return reports


# ---------------------------------------------------------------------------
# pairwise agreement of prediction vectors

def pearson(a, b) -> Optional[float]:
    a, b = _as_float(a), _as_float(b)
    sa, sb = np.std(a), np.std(b)
    if sa == 0.0 or sb == 0.0:
        return None
    return float(np.mean((a - np.mean(a)) * (b - np.mean(b))) / (sa * sb))


def spearman(a, b) -> Optional[float]:
    from scipy.stats import rankdata  # deferred: keeps import light for subprocesses

    return pearson(rankdata(a), rankdata(b))


def cohen_kappa(a, b) -> float:
    """Chance-corrected agreement between two label vectors."""
    a = np.asarray(a, dtype=object)
    b = np.asarray(b, dtype=object)
    if a.shape != b.shape:
        raise LengthMismatch("label vectors must have equal length")
    p_o = float(np.mean(a == b))
    classes = sorted({*a.tolist(), *b.tolist()}, key=str)
    p_e = float(sum(np.mean(a == c) * np.mean(b == c) for c in classes))
    if p_e >= 1.0:  # both vectors constant on the same class
        return 1.0 if p_o >= 1.0 else 0.0
    return (p_o - p_e) / (1.0 - p_e)


CORRELATION_METHODS = {"pearson", "spearman", "kappa"}


def _matrix_vectors(bundle: EnsembleBundle) -> tuple[list[str], list[np.ndarray]]:
    """Ensemble-first prediction vectors, matching the metrics table rows."""
    ids, vectors = [], []
    ensemble = ensemble_prediction_vector(bundle)
    if ensemble is not None:
        ids.append(ENSEMBLE_ID)
        vectors.append(ensemble)
    for m in bundle.models:
        ids.append(m.id)
        vectors.append(m.predictions)
    return ids, vectors


def prediction_correlation_matrix(bundle: EnsembleBundle, method: str = "pearson") -> PairMatrix:
    """Pairwise prediction agreement: pearson/spearman for regression,
    Cohen's kappa for classification. Unit diagonal by construction."""
    method = method.lower()
    if method not in CORRELATION_METHODS:
        raise MethodTaskMismatch(f"unknown correlation method {method!r}")
    if bundle.task is TaskKind.REGRESSION and method == "kappa":
        raise MethodTaskMismatch("kappa applies to classification bundles only")
    if bundle.task.is_classification and method != "kappa":
        raise MethodTaskMismatch(f"{method} applies to regression bundles only; use kappa")

    fn = {"pearson": pearson, "spearman": spearman, "kappa": cohen_kappa}[method]
    ids, vectors = _matrix_vectors(bundle)
    m = len(ids)
    values: list[list[Optional[float]]] = [[None] * m for _ in range(m)]
    for i in range(m):
        values[i][i] = 1.0
        for j in range(i + 1, m):
            v = fn(vectors[i], vectors[j])
            values[i][j] = v
            values[j][i] = v
    return PairMatrix(method, ids, values, symmetric=True)


def prediction_compare_matrix(bundle: EnsembleBundle) -> CompareMatrix:
    """Per-observation residuals (regression, raw and SD-scaled) or
    correctness cells (classification) for each model and the ensemble."""
    ids, vectors = _matrix_vectors(bundle)
    y = bundle.dataset.target
    if bundle.task is TaskKind.REGRESSION:
        sd = target_std(bundle.dataset)
        raw = [(_as_float(v) - _as_float(y)).tolist() for v in vectors]
        scaled = None if sd == 0.0 else [[r / sd for r in row] for row in raw]
        return CompareMatrix(bundle.task, ids, [float(v) for v in y], raw=raw, scaled=scaled)
    labels = [[str(v) for v in vec] for vec in vectors]
    correct = [[bool(p == t) for p, t in zip(vec, y)] for vec in vectors]
    return CompareMatrix(bundle.task, ids, [str(v) for v in y], labels=labels, correct=correct)
