"""Weighted-ensemble recombination, what-if evaluation, and weight search.

The ensemble prediction under a weight vector is the weighted average of
component predictions (regression) or of component probability rows with
an argmax class decision (classification). What-if reports compare a
candidate weighting against the bundle's original weights; the search
helper runs a budgeted coordinate ascent over a fixed multiplier grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .bundle import EnsembleBundle, TaskKind
from .errors import (
    BudgetTooSmall,
    BundleMismatch,
    InvalidObjective,
    MissingProbabilities,
    ZeroWeightSum,
)
from .metrics import (
    METRIC_DIRECTIONS,
    CLASSIFICATION_METRIC_NAMES,
    REGRESSION_METRIC_NAMES,
    MetricReport,
    score_predictions,
)

SEARCH_GRID = (0.0, 0.25, 0.5, 0.75, 1.5, 2.0)  # x current weight; 1.0 is a no-op


@dataclass
class WhatIfReport:
    raw_weights: dict[str, float]
    normalized_weights: dict[str, float]
    active_model_count: int
    candidate: MetricReport
    baseline: MetricReport
    deltas: dict[str, Optional[float]]
    holdout: Optional[dict] = None

    def to_document(self) -> dict:
        doc = {
            "weights": {"raw": dict(self.raw_weights), "normalized": dict(self.normalized_weights)},
            "active_model_count": self.active_model_count,
            "candidate": self.candidate.to_document(),
            "baseline": self.baseline.to_document(),
            "delta": dict(self.deltas),
        }
        if self.holdout is not None:
            doc["holdout"] = self.holdout
        return doc


@dataclass
class WeightProposal:
    weights: dict[str, float]
    objective_name: str
    maximize: bool
    objective_value: float
    baseline_value: float
    evaluations_used: int
    trajectory: list[tuple[int, float]] = field(default_factory=list)

    def to_document(self) -> dict:
        return {
            "weights": dict(self.weights),
            "objective": self.objective_name,
            "direction": "max" if self.maximize else "min",
            "objective_value": self.objective_value,
            "baseline_value": self.baseline_value,
            "evaluations_used": self.evaluations_used,
            "trajectory": [[i, v] for i, v in self.trajectory],
        }


def _check_coverage(bundle: EnsembleBundle, weights: dict[str, float]) -> None:
    ids = set(bundle.model_ids)
    given = set(weights)
    if given != ids:
        missing = sorted(ids - given)
        extra = sorted(given - ids)
        raise BundleMismatch(f"weights must cover exactly the bundle's model ids; "
                             f"missing {missing}, unexpected {extra}")
    bad = {k: v for k, v in weights.items() if not np.isfinite(v) or v < 0}
    if bad:
        raise BundleMismatch(f"weights must be finite and nonnegative, got {bad}")


def normalize_weights(weights: dict[str, float]) -> dict[str, float]:
    """Proportional rescale to sum 1, preserving key order."""
    total = float(sum(weights.values()))
    if not np.isfinite(total) or total <= 0:
        raise ZeroWeightSum(f"weight sum must be positive, got {total!r}")
    return {k: float(v) / total for k, v in weights.items()}


def ensemble_predict(bundle: EnsembleBundle, weights: dict[str, float]):
    """Prediction vector of the ensemble under ``weights``.

    Returns ``(predictions, probabilities)``; probabilities are None for
    regression. Classification requires probability matrices for every
    model with positive weight.
    """
    _check_coverage(bundle, weights)
    norm = normalize_weights(weights)
    support = [m for m in bundle.models if norm[m.id] > 0]

    if bundle.task is TaskKind.REGRESSION:
        stacked = np.stack([np.asarray(m.predictions, dtype=float) for m in support])
        w = np.asarray([norm[m.id] for m in support])
        combined = w @ stacked
        # float dot products can overshoot the convex hull by an ulp
        combined = np.clip(combined, stacked.min(axis=0), stacked.max(axis=0))
        return combined, None

    missing = [m.id for m in support if m.probabilities is None]
    if missing:
        raise MissingProbabilities(
            f"models {missing} have positive weight but no probability matrices", models=missing)
    stacked = np.stack([np.asarray(m.probabilities, dtype=float) for m in support])
    w = np.asarray([norm[m.id] for m in support])
    avg = np.einsum("m,mnk->nk", w, stacked)
    idx = np.argmax(avg, axis=1)  # ties resolve to the lower class index
    labels = np.asarray(list(bundle.class_labels), dtype=object)
    return labels[idx], avg


def evaluate_weights(bundle: EnsembleBundle, weights: dict[str, float],
                     holdout: Optional[EnsembleBundle] = None) -> WhatIfReport:
    """Metrics of the reweighted ensemble, with deltas against the original
    weighting (both sides recomputed through the same recombination)."""
    candidate_pred, _ = ensemble_predict(bundle, weights)
    baseline_pred, _ = ensemble_predict(bundle, bundle.weights())
    candidate = score_predictions(candidate_pred, bundle, model_id="candidate")
    baseline = score_predictions(baseline_pred, bundle, model_id="baseline")
    deltas = _deltas(candidate, baseline)

    holdout_doc = None
    if holdout is not None:
        if holdout.task is not bundle.task:
            raise BundleMismatch(f"holdout task {holdout.task.value!r} differs from {bundle.task.value!r}")
        if holdout.model_ids != bundle.model_ids:
            raise BundleMismatch("holdout bundle must list the same model ids in the same order")
        if holdout.class_labels != bundle.class_labels:
            raise BundleMismatch("holdout bundle must declare the same class labels")
        h_candidate_pred, _ = ensemble_predict(holdout, weights)
        h_baseline_pred, _ = ensemble_predict(holdout, holdout.weights())
        h_candidate = score_predictions(h_candidate_pred, holdout, model_id="candidate")
        h_baseline = score_predictions(h_baseline_pred, holdout, model_id="baseline")
        holdout_doc = {
            "candidate": h_candidate.to_document(),
            "baseline": h_baseline.to_document(),
            "delta": _deltas(h_candidate, h_baseline),
        }

    return WhatIfReport(
        raw_weights={k: float(v) for k, v in weights.items()},
        normalized_weights=normalize_weights(weights),
        active_model_count=sum(1 for v in weights.values() if v > 0),
        candidate=candidate,
        baseline=baseline,
        deltas=deltas,
        holdout=holdout_doc,
    )


def _deltas(candidate: MetricReport, baseline: MetricReport) -> dict[str, Optional[float]]:
    out: dict[str, Optional[float]] = {}
    for name, value in candidate.metrics.items():
        base = baseline.metrics.get(name)
        out[name] = None if value is None or base is None else value - base
    return out


# ---------------------------------------------------------------------------
# weight search

def resolve_objective(bundle: EnsembleBundle, objective: str,
                      maximize: Optional[bool] = None) -> tuple[str, bool]:
    """Canonical metric name and direction for an objective string."""
    names = REGRESSION_METRIC_NAMES if bundle.task is TaskKind.REGRESSION else CLASSIFICATION_METRIC_NAMES
    matches = [n for n in names if n.lower() == objective.lower()]
    if not matches:
        raise InvalidObjective(f"objective {objective!r} is not a {bundle.task.value} metric; "
                               f"choose one of {list(names)}")
    name = matches[0]
    return name, METRIC_DIRECTIONS[name] if maximize is None else maximize


def suggest_weights(bundle: EnsembleBundle, objective: str, budget: int,
                    seed: int = 0, maximize: Optional[bool] = None) -> WeightProposal:
    """Budgeted coordinate ascent over the normalized weight simplex.

    Starting from the original weights, each pass visits models in a
    seed-shuffled order and tries rescaling one model's weight by each
    multiplier in ``SEARCH_GRID`` (renormalizing the rest); strict
    improvements are accepted. Stops at the evaluation budget or after a
    full pass without improvement. Deterministic given the seed, and never
    worse than the starting weights on the optimization bundle.
    """
    name, is_max = resolve_objective(bundle, objective, maximize)
    m = len(bundle.models)
    if budget < m:
        raise BudgetTooSmall(f"budget {budget} is smaller than the model count {m}")

    def objective_value(w: dict[str, float]) -> float:
        pred, _ = ensemble_predict(bundle, w)
        value = score_predictions(pred, bundle).metrics[name]
        if value is None:
            raise InvalidObjective(f"objective {name!r} is undefined on this bundle "
                                   "(degenerate target); choose another metric")
        return value

    def better(candidate: float, incumbent: float) -> bool:
        return candidate > incumbent if is_max else candidate < incumbent

    ids = bundle.model_ids
    current = normalize_weights(bundle.weights())
    best = objective_value(current)
    baseline = best
    evaluations = 1
    trajectory: list[tuple[int, float]] = [(1, best)]
    rng = np.random.default_rng(seed)

    out_of_budget = False
    while not out_of_budget:
        improved = False
        for j in rng.permutation(m):
            mid = ids[int(j)]
            if current[mid] == 0.0:
                continue  # multiplicative grid cannot resurrect a zero weight
            for g in SEARCH_GRID:
                if evaluations >= budget:
                    out_of_budget = True
                    break
                trial = dict(current)
                trial[mid] = trial[mid] * g
                if sum(trial.values()) <= 0:
                    continue
                trial = normalize_weights(trial)
                value = objective_value(trial)
                evaluations += 1
                if better(value, best):
                    current, best = trial, value
                    trajectory.append((evaluations, best))
                    improved = True
            if out_of_budget:
                break
        if not improved:
            break

    return WeightProposal(
        weights=current,
        objective_name=name,
        maximize=is_max,
        objective_value=best,
        baseline_value=baseline,
        evaluations_used=evaluations,
        trajectory=trajectory,
    )


# ---------------------------------------------------------------------------
# composite predictor for XAI

def ensemble_predictor(bundle: EnsembleBundle, weights: Optional[dict[str, float]] = None):
    """A Predictor that recombines the per-model predictors under the given
    (default: original) weights; the route for ensemble-level explanations."""
    from .predictors import CompositePredictor, predictor_for_model
    from .errors import PredictorUnavailable

    weights = bundle.weights() if weights is None else dict(weights)
    _check_coverage(bundle, weights)
    norm = normalize_weights(weights)
    support = [m for m in bundle.models if norm[m.id] > 0]
    missing = [m.id for m in support if not m.predictor_ref]
    if missing:
        raise PredictorUnavailable(f"models {missing} have no predictor reference", models=missing)
    parts = [(predictor_for_model(bundle, m), norm[m.id]) for m in support]
    return CompositePredictor(bundle.task, parts, class_labels=bundle.class_labels)
