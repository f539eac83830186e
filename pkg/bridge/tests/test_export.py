import math

import numpy as np
import pytest

from automl_export_bridge import UnsupportedObject, export_bundle

# the diagnostics engine is the oracle: exported bundles must load, validate,
# and reproduce in-framework scores
from ensemble_lens.bundle import load_bundle, validate_bundle
from ensemble_lens.metrics import metrics_table

from conftest import (
    ToyAveragingEnsemble,
    ToyLabelOnlyClassifier,
    ToyLinearRegressor,
)


def test_exported_regression_bundle_passes_engine_validation(
        tmp_path, toy_regression_ensemble, toy_data):
    X, y = toy_data
    path = export_bundle(toy_regression_ensemble, X, y, "regression", tmp_path / "bundle")
    bundle = load_bundle(path)
    assert validate_bundle(bundle).ok
    assert bundle.model_ids == ["m1", "m2"]
    assert [m.weight for m in bundle.models] == [0.7, 0.3]


def test_engine_metrics_match_in_framework_scores(tmp_path, toy_regression_ensemble, toy_data):
    X, y = toy_data
    path = export_bundle(toy_regression_ensemble, X, y, "regression", tmp_path / "bundle")
    bundle = load_bundle(path)
    reports = {r.model_id: r for r in metrics_table(bundle)}

    # in-framework scores computed against the live objects
    for mid, component in zip(("m1", "m2"), toy_regression_ensemble.estimators_):
        pred = component.predict(X)
        rmse = math.sqrt(float(np.mean((pred - y) ** 2)))
        assert reports[mid].metrics["RMSE"] == pytest.approx(rmse, abs=1e-9)

    ens_pred = toy_regression_ensemble.predict(X)
    ens_rmse = math.sqrt(float(np.mean((ens_pred - y) ** 2)))
    assert reports["ensemble"].metrics["RMSE"] == pytest.approx(ens_rmse, abs=1e-9)


def test_classification_export_with_probabilities(tmp_path, toy_classification_ensemble,
                                                  toy_classification_data):
    X, y = toy_classification_data
    path = export_bundle(toy_classification_ensemble, X, y, "binary", tmp_path / "bundle")
    bundle = load_bundle(path)
    assert validate_bundle(bundle).ok
    assert bundle.class_labels == ("no", "yes")
    assert all(m.probabilities is not None for m in bundle.models)

    reports = {r.model_id: r for r in metrics_table(bundle)}
    for mid, component in zip(("m1", "m2"), toy_classification_ensemble.estimators_):
        acc = float(np.mean(component.predict(X) == y))
        assert reports[mid].metrics["accuracy"] == pytest.approx(acc, abs=1e-9)


def test_label_only_classifier_omits_probability_files(tmp_path, toy_classification_data):
    X, y = toy_classification_data
    ensemble = ToyAveragingEnsemble(
        [ToyLabelOnlyClassifier(0.0, [1.0, -1.0]), ToyLabelOnlyClassifier(0.2, [0.8, -0.9])])
    ensemble.predict = None  # label averaging is not meaningful; omit ensemble prediction
    path = export_bundle(ensemble, X, y, "binary", tmp_path / "bundle")
    assert not list(path.glob("proba_*.csv"))
    import json

    manifest = json.loads((path / "manifest.json").read_text())
    assert manifest["weights_lab"] is False
    bundle = load_bundle(path)
    assert not bundle.has_probabilities()


def test_uniform_weights_for_weightless_ensembles(tmp_path, toy_data):
    X, y = toy_data
    ensemble = ToyAveragingEnsemble(
        [ToyLinearRegressor(0.0, [2.0, -1.0]), ToyLinearRegressor(0.1, [1.9, -1.1])])
    path = export_bundle(ensemble, X, y, "regression", tmp_path / "bundle")
    bundle = load_bundle(path)
    assert [m.weight for m in bundle.models] == [1.0, 1.0]


def test_pandas_feature_names_are_used(tmp_path, toy_regression_ensemble, toy_data):
    pd = pytest.importorskip("pandas")
    X, y = toy_data
    frame = pd.DataFrame(X, columns=["alpha", "beta"])
    path = export_bundle(toy_regression_ensemble, frame, y, "regression", tmp_path / "bundle")
    bundle = load_bundle(path)
    assert bundle.dataset.feature_names == ("alpha", "beta")


def test_unsupported_object_guidance(tmp_path, toy_data):
    X, y = toy_data
    with pytest.raises(UnsupportedObject) as err:
        export_bundle(object(), X, y, "regression", tmp_path / "bundle")
    assert "estimators_" in str(err.value)


def test_component_without_predict_rejected(tmp_path, toy_data):
    X, y = toy_data
    ensemble = ToyAveragingEnsemble([ToyLinearRegressor(0, [1, 1]), object()])
    with pytest.raises(UnsupportedObject) as err:
        export_bundle(ensemble, X, y, "regression", tmp_path / "bundle")
    assert "predict" in str(err.value)
