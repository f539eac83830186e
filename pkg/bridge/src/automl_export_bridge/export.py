"""Export a fitted ensemble-like object into a diagnostics bundle directory.

Targets the generic fitted-estimator interface: the ensemble exposes its
components through ``estimators_`` (or ``estimators`` / ``models``), each
component answers ``predict(X)`` and classifiers ideally ``predict_proba``.
Weights are taken from ``weights``/``weights_`` when present, else uniform
(frameworks that build unweighted ensembles get equal influence).

The written bundle follows the engine's on-disk contract: ``manifest.json``,
``dataset.csv``, ``predictions.csv``, optional ``proba_<id>.csv`` files and
an optional ensemble prediction file, all with shortest round-trip decimal
cells so the engine reloads values bit-exact.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

TASKS = ("regression", "binary", "multiclass")


class UnsupportedObject(Exception):
    """The object does not expose a usable ensemble interface."""


def _label(value) -> str:
    if isinstance(value, bool) or isinstance(value, np.bool_):
        return str(bool(value)).lower()
    if isinstance(value, (np.floating, float)) and float(value).is_integer():
        return str(int(value))
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def _fmt(value) -> str:
    if isinstance(value, (np.floating, float)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return repr(float(int(value)))
    return str(value)


def _components(ensemble) -> list:
    for attr in ("estimators_", "estimators", "models", "components"):
        parts = getattr(ensemble, attr, None)
        if parts:
            parts = list(parts.values()) if isinstance(parts, dict) else list(parts)
            # tolerate sklearn-style (name, estimator) pairs
            return [p[1] if isinstance(p, tuple) and len(p) == 2 else p for p in parts]
    raise UnsupportedObject(
        "ensemble object exposes no component list; expected one of "
        "'estimators_', 'estimators', 'models', or 'components' holding the "
        "fitted component models")


def _weights(ensemble, m: int) -> list[float]:
    for attr in ("weights_", "weights"):
        w = getattr(ensemble, attr, None)
        if w is not None:
            w = [float(v) for v in w]
            if len(w) != m:
                raise UnsupportedObject(f"ensemble declares {len(w)} weights for {m} components")
            return w
    return [1.0] * m  # unweighted frameworks: uniform influence


def _feature_table(X, feature_names):
    if hasattr(X, "columns") and hasattr(X, "to_numpy"):  # pandas-style
        names = [str(c) for c in X.columns]
        values = X.to_numpy()
    else:
        values = np.asarray(X)
        if values.ndim != 2:
            raise UnsupportedObject(f"X must be a 2-D table, got shape {values.shape}")
        names = [f"x{i + 1}" for i in range(values.shape[1])]
    if feature_names is not None:
        if len(feature_names) != values.shape[1]:
            raise UnsupportedObject("feature_names length does not match the number of columns")
        names = [str(n) for n in feature_names]
    return names, values


def _predict(component, X) -> np.ndarray:
    predict = getattr(component, "predict", None)
    if predict is None:
        raise UnsupportedObject(
            f"component {type(component).__name__} has no predict(X) method")
    return np.asarray(predict(X))


def export_bundle(ensemble, X, y, task: str, out_path,
                  feature_names: Optional[Sequence[str]] = None,
                  class_labels: Optional[Sequence] = None,
                  model_ids: Optional[Sequence[str]] = None) -> Path:
    """Write a loadable bundle directory for a fitted ensemble.

    Component predictions are computed by calling each component on ``X``;
    classifier probabilities are exported when ``predict_proba`` exists.
    Returns the bundle path.
    """
    if task not in TASKS:
        raise UnsupportedObject(f"unknown task {task!r}; expected one of {TASKS}")
    components = _components(ensemble)
    if len(components) < 2:
        raise UnsupportedObject("an ensemble needs at least 2 component models")
    weights = _weights(ensemble, len(components))
    names, values = _feature_table(X, feature_names)
    y = np.asarray(y)
    n = len(y)
    if values.shape[0] != n:
        raise UnsupportedObject(f"X has {values.shape[0]} rows but y has {n}")

    classification = task != "regression"
    if classification:
        if class_labels is None:
            classes = getattr(ensemble, "classes_", None)
            if classes is None:
                for c in components:
                    classes = getattr(c, "classes_", None)
                    if classes is not None:
                        break
            if classes is None:
                classes = sorted({_label(v) for v in y})
            class_labels = list(classes)
        class_labels = [_label(c) for c in class_labels]

    ids = list(model_ids) if model_ids else [f"m{i + 1}" for i in range(len(components))]
    if len(ids) != len(components):
        raise UnsupportedObject("model_ids length does not match the component count")

    predictions, probabilities = {}, {}
    for mid, component in zip(ids, components):
        pred = _predict(component, X)
        if len(pred) != n:
            raise UnsupportedObject(
                f"component {mid} returned {len(pred)} predictions for {n} rows")
        predictions[mid] = pred
        if classification:
            proba_fn = getattr(component, "predict_proba", None)
            if proba_fn is not None:
                proba = np.asarray(proba_fn(X), dtype=float)
                comp_classes = [_label(c) for c in getattr(component, "classes_", class_labels)]
                if sorted(comp_classes) != sorted(class_labels):
                    raise UnsupportedObject(
                        f"component {mid} classes {comp_classes} do not match {class_labels}")
                order = [comp_classes.index(c) for c in class_labels]
                probabilities[mid] = proba[:, order]

    has_all_probabilities = classification and len(probabilities) == len(components)
    ensemble_prediction = None
    if callable(getattr(ensemble, "predict", None)):
        ensemble_prediction = np.asarray(ensemble.predict(X))

    out = Path(out_path)
    out.mkdir(parents=True, exist_ok=True)

    manifest = {
        "task": task,
        "target_column": "target",
        "models": [{"id": mid, "name": type(c).__name__, "weight": w}
                   for mid, c, w in zip(ids, components, weights)],
    }
    if classification:
        manifest["class_labels"] = class_labels
        if not has_all_probabilities:
            manifest["weights_lab"] = False  # probability-free: weight what-ifs unavailable
    if ensemble_prediction is not None:
        manifest["ensemble_prediction_file"] = "ensemble_prediction.csv"
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")

    with open(out / "dataset.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(names + ["target"])
        for i in range(n):
            row = [_fmt(v) if isinstance(v, (int, float, np.floating, np.integer))
                   and not isinstance(v, bool) else _label(v) for v in values[i]]
            row.append(_fmt(y[i]) if task == "regression" else _label(y[i]))
            writer.writerow(row)

    with open(out / "predictions.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(ids)
        for i in range(n):
            writer.writerow([_fmt(predictions[mid][i]) if task == "regression"
                             else _label(predictions[mid][i]) for mid in ids])

    for mid, proba in probabilities.items():
        with open(out / f"proba_{mid}.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(class_labels)
            for row in proba:
                writer.writerow([_fmt(v) for v in row])

    if ensemble_prediction is not None:
        with open(out / "ensemble_prediction.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["ensemble"])
            for v in ensemble_prediction:
                writer.writerow([_fmt(v) if task == "regression" else _label(v)])
    return out
