import numpy as np
import pytest


class ToyLinearRegressor:
    """Duck-typed fitted regressor: predict(X) = intercept + X @ coefs."""

    def __init__(self, intercept, coefs):
        self.intercept = float(intercept)
        self.coefs = np.asarray(coefs, dtype=float)

    def predict(self, X):
        return self.intercept + np.asarray(X, dtype=float) @ self.coefs


class ToyLogisticClassifier:
    """Duck-typed fitted binary classifier with classes_ and predict_proba."""

    def __init__(self, intercept, coefs, classes=("no", "yes")):
        self.intercept = float(intercept)
        self.coefs = np.asarray(coefs, dtype=float)
        self.classes_ = np.asarray(classes, dtype=object)

    def predict_proba(self, X):
        score = self.intercept + np.asarray(X, dtype=float) @ self.coefs
        pos = 1.0 / (1.0 + np.exp(-score))
        return np.column_stack([1.0 - pos, pos])

    def predict(self, X):
        return self.classes_[np.argmax(self.predict_proba(X), axis=1)]


class ToyLabelOnlyClassifier(ToyLogisticClassifier):
    predict_proba = None

    def predict(self, X):
        score = self.intercept + np.asarray(X, dtype=float) @ self.coefs
        return self.classes_[(score > 0).astype(int)]


class ToyAveragingEnsemble:
    """Weighted averaging ensemble over fitted components."""

    def __init__(self, estimators, weights=None):
        self.estimators_ = list(estimators)
        self.weights = weights

    def _normalized(self):
        w = self.weights if self.weights is not None else [1.0] * len(self.estimators_)
        total = float(sum(w))
        return [v / total for v in w]

    def predict(self, X):
        parts = [np.asarray(e.predict(X), dtype=float) for e in self.estimators_]
        return sum(w * p for w, p in zip(self._normalized(), parts))


class ToyVotingClassifier:
    """Probability-averaging classifier ensemble."""

    def __init__(self, estimators, weights=None, classes=("no", "yes")):
        self.estimators_ = list(estimators)
        self.weights = weights
        self.classes_ = np.asarray(classes, dtype=object)

    def _normalized(self):
        w = self.weights if self.weights is not None else [1.0] * len(self.estimators_)
        total = float(sum(w))
        return [v / total for v in w]

    def predict_proba(self, X):
        parts = [np.asarray(e.predict_proba(X), dtype=float) for e in self.estimators_]
        return sum(w * p for w, p in zip(self._normalized(), parts))

    def predict(self, X):
        return self.classes_[np.argmax(self.predict_proba(X), axis=1)]


@pytest.fixture
def toy_data():
    rng = np.random.default_rng(5)
    X = rng.uniform(-2, 2, (50, 2))
    y = 2.0 * X[:, 0] - X[:, 1] + rng.normal(0, 0.2, 50)
    return X, y


@pytest.fixture
def toy_regression_ensemble():
    return ToyAveragingEnsemble(
        [ToyLinearRegressor(0.1, [2.0, -1.0]), ToyLinearRegressor(-0.1, [1.8, -0.9])],
        weights=[0.7, 0.3],
    )


@pytest.fixture
def toy_classification_data():
    rng = np.random.default_rng(6)
    X = rng.uniform(-2, 2, (60, 2))
    y = np.where(1.2 * X[:, 0] - X[:, 1] + rng.normal(0, 0.3, 60) > 0, "yes", "no")
    return X, y


@pytest.fixture
def toy_classification_ensemble():
    return ToyVotingClassifier(
        [ToyLogisticClassifier(0.0, [1.2, -1.0]), ToyLogisticClassifier(0.3, [0.9, -0.8])],
        weights=[0.5, 0.5],
    )
