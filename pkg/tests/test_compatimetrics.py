import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ensemble_lens.bundle import TaskKind
from ensemble_lens.compatimetrics import (
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
    pair_metric_value,
    rmsd,
    sdr,
    strict_conjunctive_accuracy,
    two_model_confusion,
    uniformity,
)
from ensemble_lens.errors import (
    LengthMismatch,
    MetricTaskMismatch,
    MissingProbabilities,
    NegativeThreshold,
    NonBinaryTask,
    NonClassificationTask,
    XiOutOfRange,
)

from conftest import make_binary_bundle, make_regression_bundle
from oracles import (
    o_acs,
    o_acs_cumulative,
    o_ar,
    o_correctness_levels,
    o_crmse,
    o_disagreement_by_class,
    o_eight_cell,
    o_msd,
    o_rmse,
    o_sdr,
    o_uniformity,
)

# the classification fixture used throughout the worked examples
Y4 = ["1", "1", "0", "0"]
A4 = ["1", "0", "0", "1"]
B4 = ["1", "1", "1", "0"]

finite_vec = st.lists(st.floats(-100, 100), min_size=1, max_size=50)


class TestMsdRmsd:
    def test_identical_vectors(self):
        assert msd([1.0, 2.0], [1.0, 2.0]) == 0.0

    def test_worked_example(self):
        value = msd([0.0, 0.0, 0.0], [1.0, 2.0, 3.0])
        assert value == pytest.approx(14 / 3, rel=1e-12)
        assert rmsd([0.0, 0.0, 0.0], [1.0, 2.0, 3.0]) == pytest.approx(math.sqrt(14 / 3), rel=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            msd([1.0], [1.0, 2.0])

    @given(st.data())
    def test_against_bruteforce(self, data):
        n = data.draw(st.integers(1, 50))
        a = data.draw(st.lists(st.floats(-100, 100), min_size=n, max_size=n))
        b = data.draw(st.lists(st.floats(-100, 100), min_size=n, max_size=n))
        assert msd(a, b) == pytest.approx(o_msd(a, b), rel=1e-12, abs=1e-300)
        assert rmsd(a, b) ** 2 == pytest.approx(msd(a, b), rel=1e-12, abs=1e-300)


class TestSdr:
    def test_identical_vectors(self):
        assert sdr([1.0, 2.0], [1.0, 2.0], threshold=0.5) == 0.0

    def test_worked_example(self):
        # SD([0,2,4,6]) = sqrt(5); only d=3 crosses it
        y = [0.0, 2.0, 4.0, 6.0]
        a = [3.0, 0.0, 0.0, 0.0]
        b = [0.0, 0.0, 0.0, 0.0]
        assert sdr(a, b, y) == 0.25

    def test_zero_threshold_counts_everything(self):
        assert sdr([1.0, 5.0], [2.0, 1.0], threshold=0.0) == 1.0

    def test_negative_threshold(self):
        with pytest.raises(NegativeThreshold):
            sdr([1.0], [2.0], threshold=-1.0)

    def test_monotone_in_threshold(self):
        rng = np.random.default_rng(0)
        a, b = rng.normal(size=50), rng.normal(size=50)
        values = [sdr(a, b, threshold=t) for t in np.linspace(0, 5, 20)]
        assert all(x >= z for x, z in zip(values, values[1:]))


class TestAr:
    def test_identical_vectors(self):
        assert ar([1.0, 2.0], [1.0, 2.0], [5.0, 9.0]) == 1.0

    def test_worked_example(self):
        # SD(y) = sqrt(5), xi = 50 -> threshold ~ 0.04472
        y = [0.0, 2.0, 4.0, 6.0]
        a = [0.01, 0.03, 1.0, 0.05]
        b = [0.0, 0.0, 0.0, 0.0]
        assert ar(a, b, y, xi=50) == 0.5

    def test_large_xi_keeps_only_exact_zeros(self):
        a = [1.0, 2.0, 3.0]
        b = [1.0, 2.5, 3.5]
        assert ar(a, b, [0.0, 10.0, 20.0], xi=1e9) == pytest.approx(1 / 3, rel=1e-12)

    def test_xi_out_of_range(self):
        with pytest.raises(XiOutOfRange):
            ar([1.0], [1.0], [1.0, 2.0], xi=1.0)

    def test_monotone_in_xi(self):
        rng = np.random.default_rng(1)
        a, b, y = rng.normal(size=50), rng.normal(size=50), rng.normal(size=50)
        values = [ar(a, b, y, xi=xi) for xi in (2, 5, 10, 50, 200, 1000)]
        assert all(x >= z for x, z in zip(values, values[1:]))


class TestCrmse:
    def test_identical_vectors_give_rmse(self):
        a = [1.0, 3.0, 2.0]
        y = [1.5, 2.0, 2.0]
        assert crmse(a, a, y) == pytest.approx(o_rmse(a, y), rel=1e-12)

    def test_worked_example(self):
        # averaging opposite errors: CRMSE 1.0, while mean RMSE is sqrt(2)
        assert crmse([2.0, 0.0], [0.0, 2.0], [0.0, 0.0]) == 1.0
        assert (o_rmse([2.0, 0.0], [0.0, 0.0]) + o_rmse([0.0, 2.0], [0.0, 0.0])) / 2 == pytest.approx(math.sqrt(2))

    @given(st.data())
    def test_convexity_bound(self, data):
        n = data.draw(st.integers(1, 50))
        a = data.draw(st.lists(st.floats(-100, 100), min_size=n, max_size=n))
        b = data.draw(st.lists(st.floats(-100, 100), min_size=n, max_size=n))
        y = data.draw(st.lists(st.floats(-100, 100), min_size=n, max_size=n))
        assert crmse(a, b, y) <= (o_rmse(a, y) + o_rmse(b, y)) / 2 + 1e-12


class TestTwoModelConfusion:
    def test_all_correct(self):
        counts = two_model_confusion(Y4, Y4, Y4, class_labels=("0", "1"))
        assert counts.ttp == 2 and counts.ttn == 2
        assert counts.total == 4

    def test_worked_example(self):
        counts = two_model_confusion(A4, B4, Y4, class_labels=("0", "1"))
        assert counts.to_document() == {"TTP": 1, "TFP": 0, "FTP": 1, "FFP": 0,
                                        "FFN": 0, "FTN": 1, "TFN": 1, "TTN": 0}

    def test_partition_property(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            n = int(rng.integers(1, 50))
            a = rng.choice(["0", "1"], n)
            b = rng.choice(["0", "1"], n)
            y = rng.choice(["0", "1"], n)
            assert two_model_confusion(a, b, y, class_labels=("0", "1")).total == n

    def test_non_binary_rejected(self):
        with pytest.raises(NonBinaryTask):
            two_model_confusion(["a"], ["b"], ["c"])


class TestUniformity:
    def test_identical(self):
        assert uniformity(A4, A4) == 1.0
        assert incompatibility(A4, A4) == 0.0

    def test_worked_example(self):
        assert uniformity(["1", "1", "0", "0"], ["1", "0", "0", "1"]) == 0.5
        assert incompatibility(["1", "1", "0", "0"], ["1", "0", "0", "1"]) == 0.5

    def test_complement_exact(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            n = int(rng.integers(1, 60))
            a = rng.choice(["x", "y", "z"], n)
            b = rng.choice(["x", "y", "z"], n)
            assert uniformity(a, b) + incompatibility(a, b) == 1.0

    def test_equality_path_matches_eight_cell_formula(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            n = int(rng.integers(1, 60))
            a = rng.choice(["0", "1"], n)
            b = rng.choice(["0", "1"], n)
            y = rng.choice(["0", "1"], n)
            c = two_model_confusion(a, b, y, class_labels=("0", "1"))
            assert uniformity(a, b) == (c.ttp + c.ttn + c.ffp + c.ffn) / n

    def test_task_gate(self):
        with pytest.raises(NonClassificationTask):
            uniformity(["1"], ["1"], TaskKind.REGRESSION)


class TestCollectiveScores:
    def test_perfect_pair(self):
        assert average_collective_score(Y4, Y4, Y4) == 1.0
        assert acs_cumulative(Y4, Y4, Y4) == [1.0, 1.0, 1.0, 1.0]

    def test_worked_example(self):
        assert average_collective_score(A4, B4, Y4) == 0.625

    def test_acs_is_mean_of_accuracies(self):
        rng = np.random.default_rng(6)
        for _ in range(50):
            n = int(rng.integers(1, 60))
            a = rng.choice(["p", "q"], n)
            b = rng.choice(["p", "q"], n)
            y = rng.choice(["p", "q"], n)
            acc_a = float(np.mean(a == y))
            acc_b = float(np.mean(b == y))
            assert average_collective_score(a, b, y) == pytest.approx((acc_a + acc_b) / 2, rel=1e-12)

    def test_cumulative_matches_bruteforce(self):
        assert acs_cumulative(A4, B4, Y4) == pytest.approx(o_acs_cumulative(A4, B4, Y4), rel=1e-12)


class TestConjunctiveMetrics:
    def test_identical_probabilities(self):
        probs = np.array([[0.8, 0.2], [0.3, 0.7], [0.6, 0.4]])
        y = ["0", "1", "0"]
        conj = conjunctive_classification_metrics(probs, probs, y, TaskKind.BINARY, ("0", "1"))
        from ensemble_lens.metrics import classification_metrics

        labels = np.asarray(["0", "1"], dtype=object)[np.argmax(probs, axis=1)]
        base = classification_metrics(labels, y, TaskKind.BINARY, class_labels=("0", "1"))
        assert conj.metrics == {f"conjunctive_{k}": v for k, v in base.metrics.items()}

    def test_worked_example(self):
        a = np.array([[0.1, 0.9], [0.8, 0.2]])
        b = np.array([[0.4, 0.6], [0.6, 0.4]])
        conj = conjunctive_classification_metrics(a, b, ["1", "0"], TaskKind.BINARY, ("0", "1"))
        assert conj.metrics["conjunctive_accuracy"] == 1.0

    def test_strict_fallback_worked_example(self):
        assert strict_conjunctive_accuracy(A4, B4, Y4) == 0.25

    def test_missing_probabilities(self):
        with pytest.raises(MissingProbabilities):
            conjunctive_classification_metrics(None, None, Y4, TaskKind.BINARY, ("0", "1"))


class TestDisagreementByClass:
    def test_identical(self):
        assert disagreement_by_class(A4, A4, Y4) == {"0": 0.0, "1": 0.0}

    def test_worked_example(self):
        out = disagreement_by_class(A4, B4, Y4)
        assert out == {"0": 1.0, "1": 0.5}

    def test_frequency_weighted_mean_is_incompatibility(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            n = int(rng.integers(1, 60))
            a = rng.choice(["x", "y", "z"], n)
            b = rng.choice(["x", "y", "z"], n)
            y = rng.choice(["x", "y", "z"], n)
            per_class = disagreement_by_class(a, b, y)
            weighted = sum(v * float(np.mean(y == c)) for c, v in per_class.items())
            assert weighted == pytest.approx(incompatibility(a, b), rel=1e-12, abs=1e-12)


class TestCorrectnessLevels:
    def test_perfect(self):
        levels = correctness_levels(Y4, Y4, Y4)
        assert (levels.both_correct, levels.exactly_one_correct, levels.none_correct) == (1.0, 0.0, 0.0)

    def test_worked_example(self):
        levels = correctness_levels(A4, B4, Y4)
        assert (levels.both_correct, levels.exactly_one_correct, levels.none_correct) == (0.25, 0.75, 0.0)

    def test_sum_and_acs_identity(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            n = int(rng.integers(1, 60))
            a = rng.choice(["0", "1"], n)
            b = rng.choice(["0", "1"], n)
            y = rng.choice(["0", "1"], n)
            levels = correctness_levels(a, b, y)
            total = levels.both_correct + levels.exactly_one_correct + levels.none_correct
            assert total == pytest.approx(1.0, abs=1e-12)
            acs = average_collective_score(a, b, y)
            assert levels.both_correct + levels.exactly_one_correct / 2 == pytest.approx(acs, rel=1e-12)


class TestAbsDiffDistribution:
    def test_identical_vectors_degenerate(self):
        out = abs_diff_distribution([1.0, 1.0, 1.0], [1.0, 1.0, 1.0], bins=5)
        assert out == {"edges": [0.0, 0.0], "counts": [3]}

    def test_worked_example(self):
        out = abs_diff_distribution([0.0, 1.0, 2.0, 3.0], [0.0, 0.0, 0.0, 0.0], bins=2)
        assert out["edges"] == [0.0, 1.5, 3.0]
        assert out["counts"] == [2, 2]

    def test_counts_partition_n(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            n = int(rng.integers(1, 80))
            a, b = rng.normal(size=n), rng.normal(size=n)
            out = abs_diff_distribution(a, b, bins=7)
            assert sum(out["counts"]) == n


class TestSymmetry:
    @given(st.data())
    def test_regression_metrics_symmetric(self, data):
        n = data.draw(st.integers(1, 30))
        a = data.draw(st.lists(st.floats(-50, 50), min_size=n, max_size=n))
        b = data.draw(st.lists(st.floats(-50, 50), min_size=n, max_size=n))
        y = data.draw(st.lists(st.floats(-50, 50), min_size=n, max_size=n))
        assert msd(a, b) == msd(b, a)
        assert rmsd(a, b) == rmsd(b, a)
        assert sdr(a, b, threshold=1.0) == sdr(b, a, threshold=1.0)
        assert ar(a, b, threshold=1.0, xi=50) == ar(b, a, threshold=1.0, xi=50)
        assert crmse(a, b, y) == crmse(b, a, y)

    @given(st.data())
    def test_classification_metrics_symmetric(self, data):
        n = data.draw(st.integers(1, 30))
        a = data.draw(st.lists(st.sampled_from(["0", "1"]), min_size=n, max_size=n))
        b = data.draw(st.lists(st.sampled_from(["0", "1"]), min_size=n, max_size=n))
        y = data.draw(st.lists(st.sampled_from(["0", "1"]), min_size=n, max_size=n))
        assert uniformity(a, b) == uniformity(b, a)
        assert incompatibility(a, b) == incompatibility(b, a)
        assert average_collective_score(a, b, y) == average_collective_score(b, a, y)
        assert strict_conjunctive_accuracy(a, b, y) == strict_conjunctive_accuracy(b, a, y)


class TestPairMatrix:
    def test_msd_diagonal_zero(self, regression_bundle):
        matrix = pair_matrix(regression_bundle, "msd")
        assert all(matrix.values[i][i] == 0.0 for i in range(3))
        assert matrix.model_ids == ["m1", "m2", "m3"]

    def test_uniformity_diagonal_one(self, binary_bundle):
        matrix = pair_matrix(binary_bundle, "uniformity")
        assert all(matrix.values[i][i] == 1.0 for i in range(2))

    def test_cells_match_scalar_ops(self, regression_bundle, binary_bundle):
        for bundle, metric in ((regression_bundle, "crmse"), (binary_bundle, "acs")):
            matrix = pair_matrix(bundle, metric)
            for i, a in enumerate(matrix.model_ids):
                for j, b in enumerate(matrix.model_ids):
                    assert matrix.values[i][j] == pair_metric_value(bundle, metric, a, b)

    def test_task_gate(self, regression_bundle, binary_bundle):
        with pytest.raises(MetricTaskMismatch):
            pair_matrix(regression_bundle, "uniformity")
        with pytest.raises(MetricTaskMismatch):
            pair_matrix(binary_bundle, "msd")

    def test_conjunctive_matrix_needs_probabilities(self):
        bundle = make_binary_bundle(with_probabilities=False)
        with pytest.raises(MissingProbabilities):
            pair_matrix(bundle, "conjunctive_accuracy")
        # the strict variant stays available
        matrix = pair_matrix(bundle, "strict_conjunctive_accuracy")
        assert matrix.values[0][0] <= 1.0


class TestPairDetail:
    def test_regression_detail(self, regression_bundle):
        doc = pair_detail(regression_bundle, "m1", "m2")
        a = regression_bundle.model("m1").predictions
        b = regression_bundle.model("m2").predictions
        assert doc["metrics"]["msd"] == msd(a, b)
        assert sum(doc["abs_diff_histogram"]["counts"]) == regression_bundle.n

    def test_binary_detail_carries_everything(self, binary_bundle):
        doc = pair_detail(binary_bundle, "c1", "c2")
        assert {"uniformity", "incompatibility", "acs", "strict_conjunctive_accuracy",
                "conjunctive_accuracy"} <= set(doc["metrics"])
        assert "eight_cell" in doc
        assert len(doc["acs_cumulative"]) == binary_bundle.n

    def test_self_pair(self, binary_bundle):
        doc = pair_detail(binary_bundle, "c1", "c1")
        assert doc["metrics"]["uniformity"] == 1.0
        assert doc["metrics"]["incompatibility"] == 0.0
