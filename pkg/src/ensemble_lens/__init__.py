"""Diagnostics engine for ensembles of predictive models."""

from .bundle import (
    ENSEMBLE_ID,
    Dataset,
    EnsembleBundle,
    FeatureMeta,
    ModelEntry,
    TaskKind,
    ValidationReport,
    bundle_to_document,
    load_bundle,
    parse_bundle,
    parse_bundle_document,
    save_bundle,
    save_bundle_json,
    target_std,
    validate_bundle,
)
from .compatimetrics import (
    CorrectnessLevels,
    EightCellCounts,
    abs_diff_distribution,
    acs_cumulative,
    ar,
    average_collective_score,
    conjunctive_classification_metrics,
    correctness_levels,
    crmse,
    disagreement_by_class,
    incompatibility,
    msd,
    pair_detail,
    pair_matrix,
    rmsd,
    sdr,
    strict_conjunctive_accuracy,
    two_model_confusion,
    uniformity,
)
from .metrics import (
    CompareMatrix,
    MetricReport,
    PairMatrix,
    classification_metrics,
    cohen_kappa,
    metrics_table,
    prediction_compare_matrix,
    prediction_correlation_matrix,
    regression_metrics,
)
from .predictors import (
    CompositePredictor,
    LinearPredictor,
    LogisticPredictor,
    Predictor,
    Prediction,
    TreePredictor,
    connect_external,
    load_builtin,
    predict,
    run_conformance,
)
from .weights import (
    WeightProposal,
    WhatIfReport,
    ensemble_predict,
    ensemble_predictor,
    evaluate_weights,
    normalize_weights,
    suggest_weights,
)
from .xai import (
    ImportanceReport,
    PDPCurve,
    partial_dependence,
    permutation_importance,
    quantile_grid,
)

__version__ = "0.1.0"
