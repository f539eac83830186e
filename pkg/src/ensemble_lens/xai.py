"""Model-agnostic explanations: permutation importance and partial dependence.

Both operate through the Predictor abstraction only, so built-in and
external models are explained identically. Shuffle streams are keyed by
(seed, feature index, repeat index) and rows are processed in a canonical
order, so a report depends only on the data multiset, the predictor, and
the seed - not on row order or feature evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .bundle import Dataset, TaskKind
from .errors import EmptyColumn, MissingProbabilities, UnknownFeature
from .predictors import Predictor, predict

DEFAULT_REPEATS = 5
DEFAULT_GRID_SIZE = 20


@dataclass
class FeatureImportance:
    mean_drop: float
    std_drop: float
    repeats: int
    share: Optional[float] = None  # set when the report is normalized

    def to_document(self) -> dict:
        doc = {"mean_drop": self.mean_drop, "std_drop": self.std_drop, "repeats": self.repeats}
        if self.share is not None:
            doc["share"] = self.share
        return doc


@dataclass
class ImportanceReport:
    model_id: str
    metric_name: str
    baseline_score: float
    repeats: int
    seed: int
    features: dict[str, FeatureImportance]

    def to_document(self) -> dict:
        return {
            "model_id": self.model_id,
            "metric": self.metric_name,
            "baseline_score": self.baseline_score,
            "repeats": self.repeats,
            "seed": self.seed,
            "features": {name: fi.to_document() for name, fi in self.features.items()},
        }


@dataclass
class PDPCurve:
    model_id: str
    feature: str
    kind: str  # "numeric" | "categorical"
    grid: list
    averages: list  # floats (regression) or per-class float lists
    class_labels: Optional[tuple[str, ...]] = None

    def to_document(self) -> dict:
        doc = {"model_id": self.model_id, "feature": self.feature, "kind": self.kind,
               "grid": list(self.grid), "averages": self.averages}
        if self.class_labels is not None:
            doc["class_labels"] = list(self.class_labels)
        return doc


# score(predictions, y) -> (value, higher_is_better)
_SCORERS: dict[str, tuple[Callable, bool]] = {
    "rmse": (lambda p, y: float(np.sqrt(np.mean((np.asarray(p, dtype=float) - np.asarray(y, dtype=float)) ** 2))), False),
    "mse": (lambda p, y: float(np.mean((np.asarray(p, dtype=float) - np.asarray(y, dtype=float)) ** 2)), False),
    "mae": (lambda p, y: float(np.mean(np.abs(np.asarray(p, dtype=float) - np.asarray(y, dtype=float)))), False),
    "accuracy": (lambda p, y: float(np.mean(np.asarray(p, dtype=object) == np.asarray(y, dtype=object))), True),
}


def default_metric(task: TaskKind) -> str:
    return "rmse" if task is TaskKind.REGRESSION else "accuracy"


def quantile_grid(values, g: int) -> list[float]:
    """g linear-interpolation quantiles at k/(g-1), deduplicated; may return
    fewer points when the column has few distinct values."""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise EmptyColumn("cannot build a grid over an empty column")
    if g < 2:
        raise ValueError(f"grid size must be at least 2, got {g}")
    probs = np.arange(g) / (g - 1)
    return np.unique(np.quantile(arr, probs)).tolist()


def _codes(col: np.ndarray) -> np.ndarray:
    levels = {v: i for i, v in enumerate(sorted(set(col.tolist()), key=str))}
    return np.asarray([levels[v] for v in col], dtype=float)


def _canonical_order(dataset: Dataset) -> np.ndarray:
    """Stable row order derived from the data itself, so reports are
    invariant under any reordering of the input rows."""
    keys = []
    y = dataset.target
    keys.append(_codes(y) if y.dtype == object else np.asarray(y, dtype=float))
    for name in reversed(dataset.feature_names):
        col = dataset.features[name]
        keys.append(_codes(col) if col.dtype == object else np.asarray(col, dtype=float))
    return np.lexsort(tuple(keys))


def _matrix(dataset: Dataset, order: np.ndarray) -> np.ndarray:
    mat = np.empty((len(order), dataset.p), dtype=object)
    for j, name in enumerate(dataset.feature_names):
        mat[:, j] = dataset.features[name][order]
    return mat


def permutation_importance(predictor: Predictor, dataset: Dataset,
                           metric: Optional[str] = None,
                           repeats: int = DEFAULT_REPEATS, seed: int = 0,
                           model_id: str = "",
                           normalize: bool = False,
                           progress: Optional[Callable[[int, int], None]] = None) -> ImportanceReport:
    """Mean score drop caused by shuffling each feature column.

    Positive drops always mean "important": for lower-is-better metrics the
    sign is flipped. ``normalize`` adds per-feature shares of the total
    positive drop for display purposes; raw drops stay untouched.
    Deterministic given the seed.
    """
    if repeats < 1:
        raise ValueError(f"repeats must be at least 1, got {repeats}")
    metric = metric or default_metric(predictor.task)
    if metric.lower() not in _SCORERS:
        raise ValueError(f"unknown importance metric {metric!r}; choose one of {sorted(_SCORERS)}")
    score, higher_better = _SCORERS[metric.lower()]

    order = _canonical_order(dataset)
    columns = list(dataset.feature_names)
    base_matrix = _matrix(dataset, order)
    y = dataset.target[order]
    n = len(y)

    baseline = score(predict(predictor, base_matrix.tolist(), columns).values, y)
    features: dict[str, FeatureImportance] = {}
    total = len(columns)
    for fi, name in enumerate(columns):
        drops = np.empty(repeats, dtype=float)
        for r in range(repeats):
            rng = np.random.default_rng([seed, fi, r])
            shuffled = base_matrix.copy()
            shuffled[:, fi] = shuffled[rng.permutation(n), fi]
            permuted = score(predict(predictor, shuffled.tolist(), columns).values, y)
            drops[r] = baseline - permuted if higher_better else permuted - baseline
        features[name] = FeatureImportance(
            mean_drop=float(np.mean(drops)),
            std_drop=float(np.std(drops)),
            repeats=repeats,
        )
        if progress is not None:
            progress(fi + 1, total)
    if normalize:
        positive_total = sum(max(f.mean_drop, 0.0) for f in features.values())
        for f in features.values():
            f.share = (max(f.mean_drop, 0.0) / positive_total) if positive_total > 0 else 0.0
    return ImportanceReport(model_id, metric.lower(), baseline, repeats, seed, features)


def partial_dependence(predictor: Predictor, dataset: Dataset, feature: str,
                       grid_size: int = DEFAULT_GRID_SIZE,
                       row_cap: Optional[int] = None,
                       model_id: str = "") -> PDPCurve:
    """Average prediction as one feature sweeps a grid with all other cells
    fixed. Numeric features use a quantile grid; categorical features use
    their declared levels. Classification curves average per-class
    probabilities."""
    if feature not in dataset.feature_names:
        raise UnknownFeature(f"unknown feature {feature!r}; dataset has {list(dataset.feature_names)}")
    meta = dataset.meta(feature)
    order = _canonical_order(dataset)
    if row_cap is not None and row_cap < len(order):
        order = order[:row_cap]
    columns = list(dataset.feature_names)
    base_matrix = _matrix(dataset, order)
    fi = columns.index(feature)

    if meta.kind == "numeric":
        grid: list = quantile_grid(dataset.features[feature], grid_size)
    else:
        grid = list(meta.levels or ())

    averages = []
    for v in grid:
        swept = base_matrix.copy()
        swept[:, fi] = v
        out = predict(predictor, swept.tolist(), columns)
        if predictor.task is TaskKind.REGRESSION:
            averages.append(float(np.mean(np.asarray(out.values, dtype=float))))
        else:
            if out.probabilities is None:
                raise MissingProbabilities(
                    "partial dependence for classification needs probability output")
            averages.append([float(m) for m in np.mean(out.probabilities, axis=0)])
    return PDPCurve(model_id, feature, meta.kind, grid, averages,
                    class_labels=predictor.class_labels)
