"""Pairwise model-compatibility measures.

Regression pairs are compared through the per-observation absolute
difference d_i = |a_i - b_i|: mean squared difference and its root,
the strong-disagreement ratio (share of d_i at or above a threshold,
defaulting to the population SD of the target), the agreement ratio
(share of d_i at or below SD(y)/xi, xi = 50 by default), and the
conjunctive RMSE of the averaged prediction. Classification pairs are
compared through label agreement (uniformity/incompatibility), the
eight-cell two-model confusion partition, collective correctness
scores, per-class disagreement, and conjunctive metrics computed on
averaged probability rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .bundle import EnsembleBundle, TaskKind, target_std
from .errors import (
    LengthMismatch,
    MetricTaskMismatch,
    MissingProbabilities,
    NegativeThreshold,
    NonBinaryTask,
    NonClassificationTask,
    NonRegressionTask,
    XiOutOfRange,
)
from .metrics import MetricReport, PairMatrix, classification_metrics

DEFAULT_XI = 50.0

EIGHT_CELL_ORDER = ("TTP", "TFP", "FTP", "FFP", "FFN", "FTN", "TFN", "TTN")


@dataclass(frozen=True)
class EightCellCounts:
    """Two-model confusion partition.

    Cell names read <model-1 correct?><model-2 correct?><actual class>:
    e.g. FTN counts observations of the negative class that model 1 got
    wrong and model 2 got right. The eight counts partition n.
    """

    ttp: int
    tfp: int
    ftp: int
    ffp: int
    ffn: int
    ftn: int
    tfn: int
    ttn: int

    @property
    def total(self) -> int:
        return self.ttp + self.tfp + self.ftp + self.ffp + self.ffn + self.ftn + self.tfn + self.ttn

    def as_tuple(self) -> tuple[int, ...]:
        return (self.ttp, self.tfp, self.ftp, self.ffp, self.ffn, self.ftn, self.tfn, self.ttn)

    def to_document(self) -> dict:
        return dict(zip(EIGHT_CELL_ORDER, self.as_tuple()))


@dataclass(frozen=True)
class CorrectnessLevels:
    both_correct: float
    exactly_one_correct: float
    none_correct: float

    def to_document(self) -> dict:
        return {"both_correct": self.both_correct,
                "exactly_one_correct": self.exactly_one_correct,
                "none_correct": self.none_correct}


def _pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise LengthMismatch(f"prediction vectors have shapes {a.shape} and {b.shape}")
    return a, b


def _label_pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=object)
    b = np.asarray(b, dtype=object)
    if a.shape != b.shape or a.ndim != 1:
        raise LengthMismatch(f"label vectors have shapes {a.shape} and {b.shape}")
    return a, b


def abs_diff(a, b) -> np.ndarray:
    a, b = _pair(a, b)
    return np.abs(a - b)


def msd(a, b) -> float:
    """Mean squared difference between two prediction vectors."""
    a, b = _pair(a, b)
    return float(np.mean((a - b) ** 2))


def rmsd(a, b) -> float:
    return float(np.sqrt(msd(a, b)))


def sdr(a, b, y=None, threshold: Optional[float] = None) -> float:
    """Strong disagreement ratio: share of observations with d_i >= threshold.

    The threshold defaults to the population SD of the target.
    """
    if threshold is None:
        if y is None:
            raise NegativeThreshold("sdr needs either an explicit threshold or the target vector")
        threshold = float(np.std(np.asarray(y, dtype=float)))
    if threshold < 0:
        raise NegativeThreshold(f"threshold must be nonnegative, got {threshold!r}")
    d = abs_diff(a, b)
    return float(np.mean(d >= threshold))


def ar(a, b, y=None, xi: float = DEFAULT_XI, threshold: Optional[float] = None) -> float:
    """Agreement ratio: share of observations with d_i <= SD(y)/xi."""
    if xi <= 1:
        raise XiOutOfRange(f"xi must be greater than 1, got {xi!r}")
    if threshold is None:
        if y is None:
            raise NegativeThreshold("ar needs either an explicit threshold or the target vector")
        threshold = float(np.std(np.asarray(y, dtype=float))) / xi
    d = abs_diff(a, b)
    return float(np.mean(d <= threshold))


def crmse(a, b, y) -> float:
    """Conjunctive RMSE: the RMSE of the two models' averaged prediction."""
    a, b = _pair(a, b)
    y = np.asarray(y, dtype=float)
    if y.shape != a.shape:
        raise LengthMismatch("target length does not match prediction length")
    return float(np.sqrt(np.mean(((a + b) / 2.0 - y) ** 2)))


def two_model_confusion(a, b, y, class_labels: Optional[Sequence] = None,
                        positive_label=None) -> EightCellCounts:
    """Partition observations into the eight cells of the two-model
    confusion matrix (binary tasks only)."""
    a, b = _label_pair(a, b)
    y = np.asarray(y, dtype=object)
    if y.shape != a.shape:
        raise LengthMismatch("target length does not match prediction length")
    observed = sorted({*a.tolist(), *b.tolist(), *y.tolist()}, key=str)
    if class_labels is not None:
        pool = list(class_labels)
        if any(v not in pool for v in observed):
            raise NonBinaryTask(f"labels {observed} are not all drawn from {pool}")
    else:
        pool = observed
    if len(pool) > 2:
        raise NonBinaryTask(f"two-model confusion needs a binary task, got labels {pool}")
    if positive_label is None:
        positive_label = pool[1] if len(pool) > 1 else pool[0]

    counts = dict.fromkeys(EIGHT_CELL_ORDER, 0)
    for ai, bi, yi in zip(a, b, y):
        key = ("T" if ai == yi else "F") + ("T" if bi == yi else "F") + ("P" if yi == positive_label else "N")
        counts[key] += 1
    return EightCellCounts(*(counts[k] for k in EIGHT_CELL_ORDER))


def uniformity(a, b, task: Optional[TaskKind] = None) -> float:
    """Share of observations both models labelled identically."""
    if task is TaskKind.REGRESSION:
        raise NonClassificationTask("uniformity applies to classification tasks")
    a, b = _label_pair(a, b)
    return float(np.mean(a == b)) if len(a) else 1.0


def incompatibility(a, b, task: Optional[TaskKind] = None) -> float:
    """Complement of uniformity; computed as 1 - uniformity so the pair
    sums to 1 exactly."""
    return 1.0 - uniformity(a, b, task)


def collective_scores(a, b, y) -> np.ndarray:
    """Per-observation half-credit correctness: (1[a=y] + 1[b=y]) / 2."""
    a, b = _label_pair(a, b)
    y = np.asarray(y, dtype=object)
    if y.shape != a.shape:
        raise LengthMismatch("target length does not match prediction length")
    return ((a == y).astype(float) + (b == y).astype(float)) / 2.0


def average_collective_score(a, b, y) -> float:
    return float(np.mean(collective_scores(a, b, y)))


def acs_cumulative(a, b, y) -> list[float]:
    """Running mean of collective scores in dataset order; element k is the
    mean over the first k observations."""
    s = collective_scores(a, b, y)
    return (np.cumsum(s) / np.arange(1, len(s) + 1)).tolist()


def strict_conjunctive_accuracy(a, b, y) -> float:
    """Share of observations both models predicted correctly; the fallback
    conjunctive score when probabilities are unavailable."""
    a, b = _label_pair(a, b)
    y = np.asarray(y, dtype=object)
    if y.shape != a.shape:
        raise LengthMismatch("target length does not match prediction length")
    return float(np.mean((a == y) & (b == y)))


def joined_labels(a_prob, b_prob, class_labels: Sequence) -> np.ndarray:
    """Labels of the averaged probability rows; argmax ties resolve to the
    lower class index."""
    a_prob = np.asarray(a_prob, dtype=float)
    b_prob = np.asarray(b_prob, dtype=float)
    if a_prob.shape != b_prob.shape or a_prob.ndim != 2:
        raise LengthMismatch(f"probability matrices have shapes {a_prob.shape} and {b_prob.shape}")
    avg = (a_prob + b_prob) / 2.0
    idx = np.argmax(avg, axis=1)  # first maximum = lowest class index
    labels = np.asarray(list(class_labels), dtype=object)
    return labels[idx]


def conjunctive_classification_metrics(a_prob, b_prob, y, task: TaskKind,
                                       class_labels: Sequence,
                                       positive_label=None) -> MetricReport:
    """Accuracy/precision/recall/F1 of the two models' merged prediction
    (averaged probability rows, argmax), reported under conjunctive_* names."""
    if a_prob is None or b_prob is None:
        raise MissingProbabilities("conjunctive metrics need probability matrices for both models")
    merged = joined_labels(a_prob, b_prob, class_labels)
    base = classification_metrics(merged, y, task, class_labels=class_labels,
                                  positive_label=positive_label)
    return MetricReport(base.model_id,
                        {f"conjunctive_{k}": v for k, v in base.metrics.items()},
                        base.warnings)


def disagreement_by_class(a, b, y, class_labels: Optional[Sequence] = None) -> dict:
    """Per true class: share of its observations the two models labelled
    differently. Classes without observations score 0."""
    a, b = _label_pair(a, b)
    y = np.asarray(y, dtype=object)
    if y.shape != a.shape:
        raise LengthMismatch("target length does not match prediction length")
    pool = list(class_labels) if class_labels is not None else sorted(set(y.tolist()), key=str)
    out = {}
    for c in pool:
        mask = y == c
        total = int(np.sum(mask))
        out[c] = float(np.mean(a[mask] != b[mask])) if total else 0.0
    return out


def correctness_levels(a, b, y) -> CorrectnessLevels:
    """Fractions of observations where both / exactly one / neither model
    is correct."""
    a, b = _label_pair(a, b)
    y = np.asarray(y, dtype=object)
    if y.shape != a.shape:
        raise LengthMismatch("target length does not match prediction length")
    ca = a == y
    cb = b == y
    n = len(y)
    return CorrectnessLevels(
        both_correct=float(np.sum(ca & cb) / n),
        exactly_one_correct=float(np.sum(ca ^ cb) / n),
        none_correct=float(np.sum(~ca & ~cb) / n),
    )


def abs_diff_distribution(a, b, bins: int = 10) -> dict:
    """Equal-width histogram of the absolute prediction differences over
    [0, max d]; degenerates to the single bin [0, 0] when all differences
    vanish."""
    if bins < 1:
        raise ValueError(f"bins must be positive, got {bins}")
    d = abs_diff(a, b)
    top = float(d.max()) if len(d) else 0.0
    if top == 0.0:
        return {"edges": [0.0, 0.0], "counts": [int(len(d))]}
    counts, edges = np.histogram(d, bins=bins, range=(0.0, top))
    return {"edges": [float(e) for e in edges], "counts": [int(c) for c in counts]}


# ---------------------------------------------------------------------------
# bundle-level builders

REGRESSION_PAIR_METRICS = ("msd", "rmsd", "sdr", "ar", "crmse")
CLASSIFICATION_PAIR_METRICS = ("uniformity", "incompatibility", "acs",
                               "conjunctive_accuracy", "strict_conjunctive_accuracy")


def available_pair_metrics(task: TaskKind) -> tuple[str, ...]:
    return REGRESSION_PAIR_METRICS if task is TaskKind.REGRESSION else CLASSIFICATION_PAIR_METRICS


def _require_probabilities(bundle: EnsembleBundle) -> None:
    missing = [m.id for m in bundle.models if m.probabilities is None]
    if missing:
        raise MissingProbabilities(f"models {missing} have no probability matrices", models=missing)


def pair_metric_value(bundle: EnsembleBundle, metric: str, a_id: str, b_id: str) -> float:
    """One scalar compatimetric for one model pair of a bundle."""
    metric = metric.lower()
    if metric not in available_pair_metrics(bundle.task):
        raise MetricTaskMismatch(
            f"metric {metric!r} is not available for {bundle.task.value} bundles; "
            f"choose one of {list(available_pair_metrics(bundle.task))}")
    a = bundle.model(a_id)
    b = bundle.model(b_id)
    y = bundle.dataset.target
    if bundle.task is TaskKind.REGRESSION:
        if metric == "msd":
            return msd(a.predictions, b.predictions)
        if metric == "rmsd":
            return rmsd(a.predictions, b.predictions)
        if metric == "sdr":
            return sdr(a.predictions, b.predictions, threshold=target_std(bundle.dataset))
        if metric == "ar":
            return ar(a.predictions, b.predictions, threshold=target_std(bundle.dataset) / DEFAULT_XI)
        return crmse(a.predictions, b.predictions, y)
    if metric == "uniformity":
        return uniformity(a.predictions, b.predictions, bundle.task)
    if metric == "incompatibility":
        return incompatibility(a.predictions, b.predictions, bundle.task)
    if metric == "acs":
        return average_collective_score(a.predictions, b.predictions, y)
    if metric == "strict_conjunctive_accuracy":
        return strict_conjunctive_accuracy(a.predictions, b.predictions, y)
    # conjunctive_accuracy: averaged-probability construction
    if a.probabilities is None or b.probabilities is None:
        raise MissingProbabilities(
            f"metric 'conjunctive_accuracy' needs probabilities for models {a_id!r} and {b_id!r}; "
            "use 'strict_conjunctive_accuracy' for label-only bundles")
    report = conjunctive_classification_metrics(a.probabilities, b.probabilities, y,
                                                bundle.task, bundle.class_labels,
                                                bundle.resolved_positive_label())
    return report.metrics["conjunctive_accuracy"]


def pair_matrix(bundle: EnsembleBundle, metric: str) -> PairMatrix:
    """The named compatimetric applied to every component-model pair."""
    metric = metric.lower()
    if metric not in available_pair_metrics(bundle.task):
        raise MetricTaskMismatch(
            f"metric {metric!r} is not available for {bundle.task.value} bundles; "
            f"choose one of {list(available_pair_metrics(bundle.task))}")
    if metric == "conjunctive_accuracy":
        _require_probabilities(bundle)
    ids = bundle.model_ids
    m = len(ids)
    values: list[list[Optional[float]]] = [[None] * m for _ in range(m)]
    for i in range(m):
        values[i][i] = pair_metric_value(bundle, metric, ids[i], ids[i])
        for j in range(i + 1, m):
            v = pair_metric_value(bundle, metric, ids[i], ids[j])
            values[i][j] = v
            values[j][i] = v  # every supported pair metric is symmetric in (a, b)
    return PairMatrix(metric, ids, values, symmetric=True)


def pair_detail(bundle: EnsembleBundle, a_id: str, b_id: str, bins: int = 10) -> dict:
    """Every applicable compatimetric for one pair, as a single document."""
    a = bundle.model(a_id)
    b = bundle.model(b_id)
    y = bundle.dataset.target
    doc: dict = {"a": a_id, "b": b_id, "task": bundle.task.value}
    if bundle.task is TaskKind.REGRESSION:
        sd = target_std(bundle.dataset)
        from .metrics import regression_metrics
        doc["metrics"] = {
            "msd": msd(a.predictions, b.predictions),
            "rmsd": rmsd(a.predictions, b.predictions),
            "sdr": sdr(a.predictions, b.predictions, threshold=sd),
            "ar": ar(a.predictions, b.predictions, threshold=sd / DEFAULT_XI),
            "crmse": crmse(a.predictions, b.predictions, y),
            "rmse_a": regression_metrics(a.predictions, y).metrics["RMSE"],
            "rmse_b": regression_metrics(b.predictions, y).metrics["RMSE"],
        }
        doc["sd_threshold"] = sd
        doc["xi"] = DEFAULT_XI
        doc["abs_diff_histogram"] = abs_diff_distribution(a.predictions, b.predictions, bins=bins)
        return doc

    doc["metrics"] = {
        "uniformity": uniformity(a.predictions, b.predictions, bundle.task),
        "incompatibility": incompatibility(a.predictions, b.predictions, bundle.task),
        "acs": average_collective_score(a.predictions, b.predictions, y),
        "strict_conjunctive_accuracy": strict_conjunctive_accuracy(a.predictions, b.predictions, y),
    }
    if a.probabilities is not None and b.probabilities is not None:
        conj = conjunctive_classification_metrics(a.probabilities, b.probabilities, y,
                                                  bundle.task, bundle.class_labels,
                                                  bundle.resolved_positive_label())
        doc["metrics"].update(conj.metrics)
    doc["correctness_levels"] = correctness_levels(a.predictions, b.predictions, y).to_document()
    doc["disagreement_by_class"] = {str(k): v for k, v in disagreement_by_class(
        a.predictions, b.predictions, y, class_labels=bundle.class_labels).items()}
    doc["acs_cumulative"] = acs_cumulative(a.predictions, b.predictions, y)
    if bundle.task is TaskKind.BINARY:
        doc["eight_cell"] = two_model_confusion(
            a.predictions, b.predictions, y,
            class_labels=bundle.class_labels,
            positive_label=bundle.resolved_positive_label()).to_document()
    return doc
