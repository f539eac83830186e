"""Bundle data model: dataset, component models, on-disk formats, validation.

A bundle is the unit of analysis: one dataset plus the predictions (and,
for classification, predicted probabilities) of every component model,
together with the ensemble weights. Bundles are immutable after load and
safe to share across threads.

On-disk layouts (all text UTF-8):

* directory bundle::

      manifest.json      task, target_column, class_labels?, models[], ...
      dataset.csv        features + target column, RFC-4180
      predictions.csv    header = model ids, one row per observation
      proba_<id>.csv     optional per-model probability matrix
      <ensemble file>    optional, named by manifest "ensemble_prediction_file"

* single-file bundle: one JSON document with keys ``manifest``, ``dataset``,
  ``predictions``, ``probabilities`` and optionally ``ensemble_prediction``,
  embedding the same content (tables as ``{"columns": [...], "rows": [...]}``).

Class labels are treated as strings throughout; numeric-looking labels are
compared as their string form.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import (
    BundleValidationError,
    EmptyTarget,
    LengthMismatch,
    MissingManifest,
    NonStochasticProbabilityRow,
    SchemaMismatch,
    UnknownModel,
)

PROBABILITY_SUM_TOL = 1e-9
ENSEMBLE_ID = "ensemble"  # reserved pseudo-model id


class TaskKind(str, Enum):
    REGRESSION = "regression"
    BINARY = "binary"
    MULTICLASS = "multiclass"

    @property
    def is_classification(self) -> bool:
        return self is not TaskKind.REGRESSION


@dataclass(frozen=True)
class FeatureMeta:
    name: str
    kind: str  # "numeric" | "categorical"
    levels: Optional[tuple[str, ...]] = None


@dataclass
class Dataset:
    """Feature matrix plus target vector.

    Numeric columns are float64 arrays; categorical columns are object
    arrays of strings constrained to their declared levels.
    """

    feature_names: tuple[str, ...]
    features: dict[str, np.ndarray]
    target: np.ndarray
    feature_meta: dict[str, FeatureMeta]

    @property
    def n(self) -> int:
        return int(len(self.target))

    @property
    def p(self) -> int:
        return len(self.feature_names)

    def meta(self, name: str) -> FeatureMeta:
        return self.feature_meta[name]

    def rows(self) -> list[list]:
        """Materialize observations as row lists (predictor wire shape)."""
        cols = [self.features[name] for name in self.feature_names]
        return [[col[i].item() if hasattr(col[i], "item") else col[i] for col in cols]
                for i in range(self.n)]


def target_std(dataset: Dataset) -> float:
    """Population standard deviation of the target (divide by n, not n-1)."""
    y = np.asarray(dataset.target, dtype=float)
    if y.size == 0:
        raise EmptyTarget("cannot compute target standard deviation of an empty target")
    return float(np.std(y))


@dataclass
class ModelEntry:
    id: str
    name: str
    weight: float
    predictions: np.ndarray
    probabilities: Optional[np.ndarray] = None
    predictor_ref: Optional[dict] = None


@dataclass
class EnsembleBundle:
    task: TaskKind
    dataset: Dataset
    models: list[ModelEntry]
    class_labels: Optional[tuple[str, ...]] = None
    ensemble_prediction: Optional[np.ndarray] = None
    positive_label: Optional[str] = None
    target_column: str = "target"

    def __post_init__(self):
        self._by_id = {m.id: m for m in self.models}

    @property
    def n(self) -> int:
        return self.dataset.n

    @property
    def model_ids(self) -> list[str]:
        return [m.id for m in self.models]

    def model(self, model_id: str) -> ModelEntry:
        try:
            return self._by_id[model_id]
        except KeyError:
            raise UnknownModel(f"unknown model id {model_id!r}", model_id=model_id) from None

    def weights(self) -> dict[str, float]:
        return {m.id: m.weight for m in self.models}

    def resolved_positive_label(self) -> Optional[str]:
        """Designated positive class: manifest override, else second class label."""
        if self.task is not TaskKind.BINARY or not self.class_labels:
            return None
        if self.positive_label is not None:
            return self.positive_label
        return self.class_labels[1]

    def label_index(self, label: str) -> int:
        return self.class_labels.index(label)

    def has_probabilities(self) -> bool:
        return all(m.probabilities is not None for m in self.models)


@dataclass(frozen=True)
class ReportEntry:
    code: str
    message: str
    location: str = ""

    def to_document(self) -> dict:
        return {"code": self.code, "message": self.message, "location": self.location}


@dataclass
class ValidationReport:
    errors: list[ReportEntry] = field(default_factory=list)
    warnings: list[ReportEntry] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def error(self, code: str, message: str, location: str = "") -> None:
        self.errors.append(ReportEntry(code, message, location))

    def warn(self, code: str, message: str, location: str = "") -> None:
        self.warnings.append(ReportEntry(code, message, location))

    def to_document(self) -> dict:
        return {
            "errors": [e.to_document() for e in self.errors],
            "warnings": [w.to_document() for w in self.warnings],
        }


# ---------------------------------------------------------------------------
# validation

_ERROR_CLASSES = {
    "LengthMismatch": LengthMismatch,
    "NonStochasticProbabilityRow": NonStochasticProbabilityRow,
    "EmptyTarget": EmptyTarget,
}


def validate_bundle(bundle: EnsembleBundle) -> ValidationReport:
    """Check every bundle invariant; violations become report entries.

    Total: never raises on malformed-but-parseable content.
    """
    rep = ValidationReport()
    ds = bundle.dataset
    n = ds.n
    if n == 0:
        rep.error("EmptyTarget", "dataset has no observations", "dataset")

    for name in ds.feature_names:
        col = ds.features.get(name)
        if col is None or len(col) != n:
            rep.error("LengthMismatch", f"feature column {name!r} has {0 if col is None else len(col)} cells, expected {n}",
                      f"dataset.{name}")
            continue
        meta = ds.feature_meta.get(name)
        if meta is None:
            rep.error("SchemaMismatch", f"feature {name!r} has no metadata", f"dataset.{name}")
        elif meta.kind == "categorical":
            levels = set(meta.levels or ())
            bad = [v for v in col if v not in levels]
            if bad:
                rep.error("CategoricalLevelViolation",
                          f"feature {name!r} contains undeclared level {bad[0]!r}", f"dataset.{name}")
        elif meta.kind == "numeric":
            arr = np.asarray(col, dtype=float)
            if arr.size and not np.all(np.isfinite(arr)):
                rep.warn("NonFiniteFeature", f"feature {name!r} contains non-finite values", f"dataset.{name}")

    labels = bundle.class_labels
    if bundle.task is TaskKind.REGRESSION:
        if labels is not None:
            rep.error("ClassLabelArity", "regression bundles must not declare class labels", "manifest.class_labels")
        y = np.asarray(ds.target, dtype=float)
        if y.size and not np.all(np.isfinite(y)):
            rep.error("NonFiniteTarget", "regression target contains non-finite values", "dataset.target")
    else:
        if labels is None:
            rep.error("ClassLabelArity", "classification bundles must declare class labels", "manifest.class_labels")
        else:
            if len(set(labels)) != len(labels):
                rep.error("ClassLabelArity", "class labels must be distinct", "manifest.class_labels")
            if bundle.task is TaskKind.BINARY and len(labels) != 2:
                rep.error("ClassLabelArity", f"binary task requires exactly 2 class labels, got {len(labels)}",
                          "manifest.class_labels")
            if bundle.task is TaskKind.MULTICLASS and len(labels) < 3:
                rep.error("ClassLabelArity", f"multiclass task requires at least 3 class labels, got {len(labels)}",
                          "manifest.class_labels")
            if bundle.positive_label is not None and bundle.positive_label not in labels:
                rep.error("UnknownLabel", f"positive_label {bundle.positive_label!r} is not a class label",
                          "manifest.positive_label")
            _check_labels(rep, ds.target, labels, "dataset.target")

    if len(bundle.models) < 2:
        rep.error("TooFewModels", f"a bundle needs at least 2 component models, got {len(bundle.models)}", "manifest.models")
    seen: set[str] = set()
    for m in bundle.models:
        loc = f"models[{m.id}]"
        if m.id in seen:
            rep.error("DuplicateModelId", f"model id {m.id!r} appears more than once", loc)
        seen.add(m.id)
        if m.id == ENSEMBLE_ID:
            rep.error("ReservedModelId", f"model id {ENSEMBLE_ID!r} is reserved", loc)
        if not math.isfinite(m.weight) or m.weight < 0:
            rep.error("NegativeWeight", f"model {m.id!r} has invalid weight {m.weight!r}", loc)
        if len(m.predictions) != n:
            rep.error("LengthMismatch",
                      f"model {m.id!r} has {len(m.predictions)} predictions, expected {n}", loc)
        elif bundle.task is TaskKind.REGRESSION:
            arr = np.asarray(m.predictions, dtype=float)
            if arr.size and not np.all(np.isfinite(arr)):
                rep.error("NonFinitePrediction", f"model {m.id!r} has non-finite predictions", loc)
        elif labels:
            _check_labels(rep, m.predictions, labels, f"{loc}.predictions")

        if bundle.task.is_classification:
            _validate_probabilities(rep, bundle, m, n)
        elif m.probabilities is not None:
            rep.error("SchemaMismatch", f"model {m.id!r} carries probabilities in a regression bundle", loc)

    total = sum(m.weight for m in bundle.models if math.isfinite(m.weight) and m.weight >= 0)
    if total <= 0:
        rep.error("ZeroWeightSum", "model weights must sum to a positive value", "manifest.models")

    ep = bundle.ensemble_prediction
    if ep is not None:
        if len(ep) != n:
            rep.error("LengthMismatch", f"ensemble prediction has {len(ep)} entries, expected {n}", "ensemble_prediction")
        elif bundle.task is TaskKind.REGRESSION:
            arr = np.asarray(ep, dtype=float)
            if arr.size and not np.all(np.isfinite(arr)):
                rep.error("NonFinitePrediction", "ensemble prediction contains non-finite values", "ensemble_prediction")
        elif labels:
            _check_labels(rep, ep, labels, "ensemble_prediction")
    return rep


def _check_labels(rep: ValidationReport, values, labels: Sequence[str], location: str) -> None:
    valid = set(labels)
    for i, v in enumerate(values):
        if v not in valid:
            rep.error("UnknownLabel", f"label {v!r} at row {i} is not a declared class label", location)
            return


def _validate_probabilities(rep: ValidationReport, bundle: EnsembleBundle, m: ModelEntry, n: int) -> None:
    loc = f"models[{m.id}].probabilities"
    if m.probabilities is None:
        rep.warn("MissingProbabilities", f"model {m.id!r} has no probability matrix; "
                 "probability-based analyses are unavailable", loc)
        return
    labels = bundle.class_labels
    k = len(labels) if labels else 0
    prob = np.asarray(m.probabilities, dtype=float)
    if prob.ndim != 2 or prob.shape != (n, k):
        rep.error("ProbabilityShapeMismatch",
                  f"model {m.id!r} probability matrix has shape {tuple(prob.shape)}, expected {(n, k)}", loc)
        return
    if prob.size and (not np.all(np.isfinite(prob)) or (prob < 0).any() or (prob > 1).any()):
        rep.error("ProbabilityOutOfRange", f"model {m.id!r} has probability entries outside [0, 1]", loc)
    sums = prob.sum(axis=1)
    bad = np.nonzero(np.abs(sums - 1.0) > PROBABILITY_SUM_TOL)[0]
    if bad.size:
        rep.error("NonStochasticProbabilityRow",
                  f"model {m.id!r} probability row {int(bad[0])} sums to {float(sums[bad[0]])!r}", loc)
        return
    if labels and len(m.predictions) == n:
        row_max = prob.max(axis=1) if n else np.empty(0)
        for i in range(n):
            lbl = m.predictions[i]
            if lbl not in labels:
                continue  # reported as UnknownLabel already
            if prob[i, labels.index(lbl)] != row_max[i]:
                rep.error("LabelArgmaxMismatch",
                          f"model {m.id!r} row {i}: stored label {lbl!r} does not attain "
                          "the row-maximal probability", loc)
                return


def raise_for_report(report: ValidationReport) -> None:
    """Raise a typed error for the first report entry, carrying the full report."""
    if report.ok:
        return
    first = report.errors[0]
    summary = "; ".join(f"{e.code} at {e.location}: {e.message}" for e in report.errors[:5])
    cls = _ERROR_CLASSES.get(first.code, BundleValidationError)
    exc = cls(summary)
    exc.report = report  # type: ignore[attr-defined]
    raise exc


# ---------------------------------------------------------------------------
# parsing

def load_bundle(path) -> EnsembleBundle:
    """Parse and validate a bundle directory or single-file bundle."""
    bundle = parse_bundle(path)
    raise_for_report(validate_bundle(bundle))
    return bundle


def parse_bundle(path) -> EnsembleBundle:
    """Parse without full validation; raises only when no bundle can be built."""
    path = Path(path)
    if path.is_dir():
        return _parse_dir(path)
    if path.is_file():
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise SchemaMismatch(f"single-file bundle is not valid JSON: {exc}") from exc
        return parse_bundle_document(doc)
    raise MissingManifest(f"bundle path {path} does not exist")


def _parse_dir(path: Path) -> EnsembleBundle:
    manifest_path = path / "manifest.json"
    if not manifest_path.exists():
        raise MissingManifest(f"no manifest.json in bundle directory {path}")
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaMismatch(f"manifest.json is not valid JSON: {exc}") from exc
    task, labels = _manifest_task(manifest)

    dataset_path = path / "dataset.csv"
    if not dataset_path.exists():
        raise SchemaMismatch(f"bundle directory {path} is missing dataset.csv")
    ds_header, ds_rows = _read_csv(dataset_path)

    pred_path = path / "predictions.csv"
    if not pred_path.exists():
        raise SchemaMismatch(f"bundle directory {path} is missing predictions.csv")
    pred_header, pred_rows = _read_csv(pred_path)

    probabilities = {}
    for spec in manifest.get("models", []):
        mid = str(spec.get("id"))
        proba_path = path / f"proba_{mid}.csv"
        if proba_path.exists():
            probabilities[mid] = _read_csv(proba_path)

    ensemble_cells = None
    ep_file = manifest.get("ensemble_prediction_file")
    if ep_file:
        ep_path = path / ep_file
        if not ep_path.exists():
            raise SchemaMismatch(f"manifest names ensemble prediction file {ep_file!r} which does not exist")
        _, ep_rows = _read_csv(ep_path)
        ensemble_cells = [row[0] for row in ep_rows if row]

    return _build_bundle(manifest, task, labels, ds_header, ds_rows,
                         pred_header, pred_rows, probabilities, ensemble_cells)


def parse_bundle_document(doc: dict) -> EnsembleBundle:
    """Parse the single-file JSON bundle variant."""
    if not isinstance(doc, dict) or "manifest" not in doc:
        raise MissingManifest("single-file bundle must carry a 'manifest' key")
    manifest = doc["manifest"]
    task, labels = _manifest_task(manifest)
    ds = doc.get("dataset")
    if not isinstance(ds, dict) or "columns" not in ds or "rows" not in ds:
        raise SchemaMismatch("single-file bundle needs dataset.columns and dataset.rows")
    preds = doc.get("predictions")
    if not isinstance(preds, dict) or "columns" not in preds or "rows" not in preds:
        raise SchemaMismatch("single-file bundle needs predictions.columns and predictions.rows")
    probabilities = {}
    for mid, table in (doc.get("probabilities") or {}).items():
        probabilities[str(mid)] = ([str(c) for c in table["columns"]], table["rows"])
    ensemble_cells = doc.get("ensemble_prediction")
    return _build_bundle(manifest, task, labels,
                         [str(c) for c in ds["columns"]], ds["rows"],
                         [str(c) for c in preds["columns"]], preds["rows"],
                         probabilities, ensemble_cells)


def _manifest_task(manifest: dict) -> tuple[TaskKind, Optional[tuple[str, ...]]]:
    if not isinstance(manifest, dict):
        raise SchemaMismatch("manifest must be a JSON object")
    raw = manifest.get("task")
    try:
        task = TaskKind(raw)
    except ValueError:
        raise SchemaMismatch(f"unknown task {raw!r}; expected regression, binary, or multiclass") from None
    labels = manifest.get("class_labels")
    if labels is not None:
        labels = tuple(_label(v) for v in labels)
    return task, labels


def _label(value) -> str:
    # canonical string form: JSON integers and their string forms coincide
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    return str(value)


def _read_csv(path: Path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        rows = list(reader)
    if not rows:
        raise SchemaMismatch(f"{path.name} is empty")
    return rows[0], rows[1:]


def _is_number(cell) -> bool:
    if isinstance(cell, bool):
        return False
    if isinstance(cell, (int, float)):
        return True
    try:
        float(cell)
        return True
    except (TypeError, ValueError):
        return False


def _build_bundle(manifest, task, labels, ds_header, ds_rows,
                  pred_header, pred_rows, probabilities, ensemble_cells) -> EnsembleBundle:
    target_column = manifest.get("target_column")
    if not target_column or target_column not in ds_header:
        raise SchemaMismatch(f"target column {target_column!r} not found in dataset header {ds_header}")
    for row in ds_rows:
        if len(row) != len(ds_header):
            raise SchemaMismatch(f"dataset row has {len(row)} cells, header has {len(ds_header)}")

    columns = {name: [row[i] for row in ds_rows] for i, name in enumerate(ds_header)}
    target_cells = columns.pop(target_column)
    feature_names = tuple(name for name in ds_header if name != target_column)

    features: dict[str, np.ndarray] = {}
    meta: dict[str, FeatureMeta] = {}
    for name in feature_names:
        cells = columns[name]
        if cells and all(_is_number(c) for c in cells):
            features[name] = np.asarray([float(c) for c in cells], dtype=float)
            meta[name] = FeatureMeta(name, "numeric")
        else:
            values = np.asarray([_label(c) for c in cells], dtype=object)
            levels = tuple(sorted(set(values.tolist())))
            features[name] = values
            meta[name] = FeatureMeta(name, "categorical", levels)

    if task is TaskKind.REGRESSION:
        target = _numeric_vector(target_cells, f"target column {target_column!r}")
    else:
        target = np.asarray([_label(c) for c in target_cells], dtype=object)
    dataset = Dataset(feature_names, features, target, meta)

    model_specs = manifest.get("models") or []
    if not isinstance(model_specs, list) or not model_specs:
        raise SchemaMismatch("manifest.models must be a non-empty list")
    ids = [str(spec.get("id")) for spec in model_specs]
    missing = [mid for mid in ids if mid not in pred_header]
    if missing:
        raise SchemaMismatch(f"predictions table lacks columns for models {missing}")
    extra = [c for c in pred_header if c not in ids]
    if extra:
        raise SchemaMismatch(f"predictions table has columns {extra} not declared in the manifest")

    # ragged prediction rows are tolerated here so that per-model length
    # violations surface as LengthMismatch report entries, not parse failures
    per_model_cells: dict[str, list] = {mid: [] for mid in ids}
    col_of = {mid: pred_header.index(mid) for mid in ids}
    for row in pred_rows:
        for mid in ids:
            i = col_of[mid]
            if i < len(row) and row[i] != "":
                per_model_cells[mid].append(row[i])

    models = []
    for spec in model_specs:
        mid = str(spec.get("id"))
        cells = per_model_cells[mid]
        if task is TaskKind.REGRESSION:
            predictions = _numeric_vector(cells, f"predictions of model {mid!r}")
        else:
            predictions = np.asarray([_label(c) for c in cells], dtype=object)
        prob = None
        if mid in probabilities:
            prob = _build_probabilities(probabilities[mid], labels, mid)
        weight = spec.get("weight", 1.0)
        if not isinstance(weight, (int, float)) or isinstance(weight, bool):
            raise SchemaMismatch(f"model {mid!r} weight must be a number, got {weight!r}")
        models.append(ModelEntry(
            id=mid,
            name=str(spec.get("name", mid)),
            weight=float(weight),
            predictions=predictions,
            probabilities=prob,
            predictor_ref=spec.get("predictor"),
        ))

    ensemble_prediction = None
    if ensemble_cells is not None:
        if task is TaskKind.REGRESSION:
            ensemble_prediction = _numeric_vector(ensemble_cells, "ensemble prediction")
        else:
            ensemble_prediction = np.asarray([_label(c) for c in ensemble_cells], dtype=object)

    positive = manifest.get("positive_label")
    return EnsembleBundle(
        task=task,
        dataset=dataset,
        models=models,
        class_labels=labels,
        ensemble_prediction=ensemble_prediction,
        positive_label=None if positive is None else _label(positive),
        target_column=str(target_column),
    )


def _numeric_vector(cells, what: str) -> np.ndarray:
    out = np.empty(len(cells), dtype=float)
    for i, c in enumerate(cells):
        try:
            out[i] = float(c)
        except (TypeError, ValueError):
            raise SchemaMismatch(f"{what} has non-numeric cell {c!r} at row {i}") from None
    return out


def _build_probabilities(table, labels, mid) -> np.ndarray:
    header, rows = table
    if labels is None:
        raise SchemaMismatch(f"probability file for model {mid!r} in a bundle without class labels")
    if set(header) != set(labels):
        raise SchemaMismatch(f"probability columns {header} for model {mid!r} do not match class labels {list(labels)}")
    order = [header.index(lbl) for lbl in labels]
    out = np.empty((len(rows), len(labels)), dtype=float)
    for i, row in enumerate(rows):
        if len(row) != len(header):
            raise SchemaMismatch(f"probability row {i} for model {mid!r} has {len(row)} cells, expected {len(header)}")
        for j, k in enumerate(order):
            try:
                out[i, j] = float(row[k])
            except (TypeError, ValueError):
                raise SchemaMismatch(f"probability cell {row[k]!r} for model {mid!r} at row {i} is not numeric") from None
    return out


# ---------------------------------------------------------------------------
# serialization

def _fmt(value) -> str:
    """Shortest round-trip decimal text for numeric cells."""
    if isinstance(value, (np.floating, float)):
        return repr(float(value))
    return str(value)


def save_bundle(bundle: EnsembleBundle, path) -> Path:
    """Write a bundle directory; reloading yields field-identical content."""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    manifest = {
        "task": bundle.task.value,
        "target_column": bundle.target_column,
        "models": [
            {"id": m.id, "name": m.name, "weight": m.weight,
             **({"predictor": m.predictor_ref} if m.predictor_ref else {})}
            for m in bundle.models
        ],
    }
    if bundle.class_labels is not None:
        manifest["class_labels"] = list(bundle.class_labels)
    if bundle.positive_label is not None:
        manifest["positive_label"] = bundle.positive_label
    if bundle.ensemble_prediction is not None:
        manifest["ensemble_prediction_file"] = "ensemble_prediction.csv"
    (path / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")

    ds = bundle.dataset
    with open(path / "dataset.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(ds.feature_names) + [bundle.target_column])
        for i in range(ds.n):
            row = [_fmt(ds.features[name][i]) for name in ds.feature_names]
            row.append(_fmt(ds.target[i]))
            writer.writerow(row)

    with open(path / "predictions.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(bundle.model_ids)
        for i in range(ds.n):
            writer.writerow([_fmt(m.predictions[i]) for m in bundle.models])

    for m in bundle.models:
        if m.probabilities is None:
            continue
        with open(path / f"proba_{m.id}.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(list(bundle.class_labels))
            for row in m.probabilities:
                writer.writerow([_fmt(v) for v in row])

    if bundle.ensemble_prediction is not None:
        with open(path / "ensemble_prediction.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow([ENSEMBLE_ID])
            for v in bundle.ensemble_prediction:
                writer.writerow([_fmt(v)])
    return path


def bundle_to_document(bundle: EnsembleBundle) -> dict:
    """Single-file JSON form of a bundle."""
    ds = bundle.dataset
    manifest = {
        "task": bundle.task.value,
        "target_column": bundle.target_column,
        "models": [
            {"id": m.id, "name": m.name, "weight": m.weight,
             **({"predictor": m.predictor_ref} if m.predictor_ref else {})}
            for m in bundle.models
        ],
    }
    if bundle.class_labels is not None:
        manifest["class_labels"] = list(bundle.class_labels)
    if bundle.positive_label is not None:
        manifest["positive_label"] = bundle.positive_label

    def cell(v):
        if isinstance(v, (np.floating, float)):
            return float(v)
        return v

    doc = {
        "manifest": manifest,
        "dataset": {
            "columns": list(ds.feature_names) + [bundle.target_column],
            "rows": [[cell(ds.features[name][i]) for name in ds.feature_names] + [cell(ds.target[i])]
                     for i in range(ds.n)],
        },
        "predictions": {
            "columns": bundle.model_ids,
            "rows": [[cell(m.predictions[i]) for m in bundle.models] for i in range(ds.n)],
        },
    }
    probs = {m.id: {"columns": list(bundle.class_labels), "rows": [[float(v) for v in row] for row in m.probabilities]}
             for m in bundle.models if m.probabilities is not None}
    if probs:
        doc["probabilities"] = probs
    if bundle.ensemble_prediction is not None:
        doc["ensemble_prediction"] = [cell(v) for v in bundle.ensemble_prediction]
    return doc


def save_bundle_json(bundle: EnsembleBundle, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(bundle_to_document(bundle)) + "\n", encoding="utf-8")
    return path
