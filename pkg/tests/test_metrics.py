import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ensemble_lens.bundle import ENSEMBLE_ID, TaskKind
from ensemble_lens.errors import MethodTaskMismatch, UnknownLabel
from ensemble_lens.metrics import (
    classification_metrics,
    cohen_kappa,
    metrics_table,
    pearson,
    prediction_compare_matrix,
    prediction_correlation_matrix,
    regression_metrics,
    spearman,
)

from conftest import make_binary_bundle, make_regression_bundle
from oracles import o_accuracy, o_binary_prf, o_rmse


class TestRegressionMetrics:
    def test_perfect_prediction(self):
        r = regression_metrics([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
        assert r.metrics["MSE"] == 0.0
        assert r.metrics["R2"] == 1.0
        assert r.warnings == []

    def test_worked_example(self):
        r = regression_metrics([2.0, 2.0], [1.0, 2.0])
        assert r.metrics["MSE"] == pytest.approx(0.5, rel=1e-12)
        assert r.metrics["MAE"] == pytest.approx(0.5, rel=1e-12)
        assert r.metrics["MAPE"] == pytest.approx(0.5, rel=1e-12)

    def test_zero_target_omits_mape_with_warning(self):
        r = regression_metrics([1.0, 1.0], [0.0, 2.0])
        assert r.metrics["MAPE"] is None
        assert "ZeroTargetForMAPE" in r.warnings
        assert r.metrics["MSE"] == pytest.approx(1.0, rel=1e-12)

    def test_constant_target_degenerate_r2(self):
        r = regression_metrics([1.0, 2.0], [3.0, 3.0])
        assert r.metrics["R2"] is None
        assert "DegenerateR2" in r.warnings

    def test_report_key_set(self):
        r = regression_metrics([1.0], [2.0])
        assert list(r.metrics) == ["MSE", "RMSE", "MAE", "MAPE", "R2"]

    @given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=40),
           st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=40))
    def test_rmse_squared_is_mse(self, pred, y):
        n = min(len(pred), len(y))
        r = regression_metrics(pred[:n], y[:n])
        assert r.metrics["RMSE"] ** 2 == pytest.approx(r.metrics["MSE"], rel=1e-12, abs=1e-300)

    @given(st.data())
    def test_permutation_invariance(self, data):
        n = data.draw(st.integers(2, 30))
        pred = data.draw(st.lists(st.floats(-100, 100), min_size=n, max_size=n))
        y = data.draw(st.lists(st.floats(1, 100), min_size=n, max_size=n))
        perm = data.draw(st.permutations(range(n)))
        base = regression_metrics(pred, y).metrics
        shuffled = regression_metrics([pred[i] for i in perm], [y[i] for i in perm]).metrics
        for name in ("MSE", "MAE"):
            assert base[name] == pytest.approx(shuffled[name], rel=1e-12)


class TestClassificationMetrics:
    def test_perfect_binary_and_multiclass(self):
        for task, y in ((TaskKind.BINARY, ["1", "0", "1"]), (TaskKind.MULTICLASS, ["a", "b", "c"])):
            r = classification_metrics(y, y, task)
            assert all(v == 1.0 for v in r.metrics.values())

    def test_binary_worked_example(self):
        r = classification_metrics(["1", "0", "0", "0"], ["1", "1", "0", "0"],
                                   TaskKind.BINARY, class_labels=("0", "1"))
        assert r.metrics["accuracy"] == 0.75
        assert r.metrics["precision"] == 1.0
        assert r.metrics["recall"] == 0.5
        assert r.metrics["f1"] == pytest.approx(2 / 3, rel=1e-12)

    def test_multiclass_macro_with_zero_division(self):
        r = classification_metrics(["a", "a", "a"], ["a", "b", "c"], TaskKind.MULTICLASS)
        assert r.metrics["accuracy"] == pytest.approx(1 / 3, rel=1e-12)
        assert r.metrics["precision"] == pytest.approx(1 / 9, rel=1e-12)
        assert r.warnings  # zero-division fallbacks recorded

    def test_positive_class_is_second_label(self):
        # flipping the label order flips which class precision/recall describe
        pred, y = ["x", "x", "y"], ["x", "y", "y"]
        on_y = classification_metrics(pred, y, TaskKind.BINARY, class_labels=("x", "y"))
        on_x = classification_metrics(pred, y, TaskKind.BINARY, class_labels=("y", "x"))
        assert on_y.metrics["recall"] == 0.5   # positive=y: one of two found
        assert on_x.metrics["recall"] == 1.0   # positive=x: the single x found

    def test_unknown_label_raises(self):
        with pytest.raises(UnknownLabel):
            classification_metrics(["z"], ["a"], TaskKind.BINARY, class_labels=("a", "b"))

    def test_accuracy_is_complement_of_hamming(self):
        pred = ["a", "b", "a", "c", "c"]
        y = ["a", "a", "a", "c", "b"]
        r = classification_metrics(pred, y, TaskKind.MULTICLASS)
        hamming = sum(p != t for p, t in zip(pred, y)) / len(y)
        assert r.metrics["accuracy"] == 1.0 - hamming

    @given(st.data())
    def test_binary_matches_bruteforce(self, data):
        n = data.draw(st.integers(1, 40))
        pred = data.draw(st.lists(st.sampled_from(["n", "p"]), min_size=n, max_size=n))
        y = data.draw(st.lists(st.sampled_from(["n", "p"]), min_size=n, max_size=n))
        r = classification_metrics(pred, y, TaskKind.BINARY, class_labels=("n", "p"))
        precision, recall, f1 = o_binary_prf(pred, y, "p")
        assert r.metrics["accuracy"] == o_accuracy(pred, y)
        assert r.metrics["precision"] == pytest.approx(precision, rel=1e-12)
        assert r.metrics["recall"] == pytest.approx(recall, rel=1e-12)
        assert r.metrics["f1"] == pytest.approx(f1, rel=1e-12)


class TestMetricsTable:
    def test_report_count_and_order(self, regression_bundle):
        reports = metrics_table(regression_bundle)
        assert len(reports) == 4
        assert reports[0].model_id == ENSEMBLE_ID
        assert [r.model_id for r in reports[1:]] == ["m1", "m2", "m3"]

    def test_one_hot_weights_reproduce_component(self):
        bundle = make_regression_bundle()
        bundle.models[0].weight = 1.0
        bundle.models[1].weight = 0.0
        bundle.models[2].weight = 0.0
        reports = metrics_table(bundle)
        assert reports[0].metrics == reports[1].metrics

    def test_fixture_against_hand_computed(self):
        bundle = make_regression_bundle(n=25, seed=9)
        reports = {r.model_id: r for r in metrics_table(bundle)}
        y = bundle.dataset.target.tolist()
        for m in bundle.models:
            pred = m.predictions.tolist()
            assert reports[m.id].metrics["RMSE"] == pytest.approx(o_rmse(pred, y), rel=1e-12)
            mae = sum(abs(p - t) for p, t in zip(pred, y)) / len(y)
            assert reports[m.id].metrics["MAE"] == pytest.approx(mae, rel=1e-12)

    def test_probability_free_classification_omits_ensemble(self):
        bundle = make_binary_bundle(with_probabilities=False)
        reports = metrics_table(bundle)
        assert [r.model_id for r in reports] == ["c1", "c2"]

    def test_stored_ensemble_prediction_used(self):
        bundle = make_binary_bundle(with_probabilities=False, with_ensemble_prediction=True)
        reports = metrics_table(bundle)
        assert reports[0].model_id == ENSEMBLE_ID
        assert reports[0].metrics == reports[1].metrics  # stored copy of c1


class TestCorrelationMatrix:
    def test_identical_vectors_cell_one(self, regression_bundle):
        for method in ("pearson", "spearman"):
            matrix = prediction_correlation_matrix(regression_bundle, method)
            assert all(matrix.values[i][i] == 1.0 for i in range(len(matrix.model_ids)))

    def test_exact_anticorrelation(self):
        assert pearson([1.0, 2.0, 3.0], [3.0, 2.0, 1.0]) == pytest.approx(-1.0, rel=1e-12)
        assert spearman([1.0, 2.0, 3.0], [3.0, 2.0, 1.0]) == pytest.approx(-1.0, rel=1e-12)

    def test_kappa_chance_level_is_zero(self):
        assert cohen_kappa(["1", "1", "0", "0"], ["1", "0", "1", "0"]) == 0.0

    def test_kappa_identical_is_one(self):
        assert cohen_kappa(["a", "b", "a"], ["a", "b", "a"]) == 1.0

    def test_method_task_gate(self, regression_bundle, binary_bundle):
        with pytest.raises(MethodTaskMismatch):
            prediction_correlation_matrix(regression_bundle, "kappa")
        with pytest.raises(MethodTaskMismatch):
            prediction_correlation_matrix(binary_bundle, "pearson")

    def test_symmetric_unit_diagonal(self, binary_bundle):
        matrix = prediction_correlation_matrix(binary_bundle, "kappa")
        m = len(matrix.model_ids)
        for i in range(m):
            assert matrix.values[i][i] == 1.0
            for j in range(m):
                assert matrix.values[i][j] == matrix.values[j][i]


class TestCompareMatrix:
    def test_perfect_model_all_zero(self, regression_bundle):
        cm = prediction_compare_matrix(regression_bundle)
        # m1's predictor is the true generating function minus noise; not zero.
        # Construct a perfect model instead:
        bundle = make_regression_bundle()
        bundle.models[0].predictions = bundle.dataset.target.copy()
        cm = prediction_compare_matrix(bundle)
        row = cm.raw[cm.model_ids.index("m1")]
        assert all(v == 0.0 for v in row)

    def test_scaled_residuals(self):
        from ensemble_lens.bundle import Dataset, EnsembleBundle, FeatureMeta, ModelEntry

        # y = [10, 18]: population SD is 4
        ds = Dataset(("x",), {"x": np.array([0.0, 1.0])}, np.array([10.0, 18.0]),
                     {"x": FeatureMeta("x", "numeric")})
        bundle = EnsembleBundle(task=TaskKind.REGRESSION, dataset=ds, models=[
            ModelEntry("a", "a", 1.0, np.array([12.0, 18.0])),
            ModelEntry("b", "b", 1.0, np.array([10.0, 18.0])),
        ])
        cm = prediction_compare_matrix(bundle)
        i = cm.model_ids.index("a")
        assert cm.raw[i][0] == 2.0
        assert cm.scaled[i][0] == 0.5

    def test_classification_cells(self, binary_bundle):
        cm = prediction_compare_matrix(make_binary_bundle(with_probabilities=True))
        i = cm.model_ids.index("c1")
        for correct, label, truth in zip(cm.correct[i], cm.labels[i], cm.y):
            assert correct == (label == truth)
