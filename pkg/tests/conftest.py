import numpy as np
import pytest
from hypothesis import settings

from ensemble_lens.bundle import Dataset, EnsembleBundle, FeatureMeta, ModelEntry, TaskKind

settings.register_profile("suite", max_examples=50, deadline=None)
settings.load_profile("suite")


def _linear_outputs(intercept, coefs, features):
    out = np.full(len(next(iter(features.values()))), float(intercept))
    for name, c in coefs.items():
        out = out + c * features[name]
    return out


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z))


def make_regression_dataset(n=40, seed=1):
    rng = np.random.default_rng(seed)
    x1 = rng.uniform(-3, 3, n)
    x2 = rng.uniform(0, 5, n)
    seg = rng.choice(["a", "b"], n)
    y = 3.0 * x1 - 2.0 * x2 + 1.0 + rng.normal(0, 0.5, n)
    return Dataset(
        feature_names=("x1", "x2", "seg"),
        features={"x1": x1, "x2": x2, "seg": np.asarray(seg, dtype=object)},
        target=y,
        feature_meta={
            "x1": FeatureMeta("x1", "numeric"),
            "x2": FeatureMeta("x2", "numeric"),
            "seg": FeatureMeta("seg", "categorical", ("a", "b")),
        },
    )


def make_regression_bundle(n=40, seed=1, with_predictors=True):
    """Three linear component models whose stored predictions match their
    predictor references exactly (the 'seg' feature is unused by all)."""
    ds = make_regression_dataset(n=n, seed=seed)
    specs = [
        ("m1", 0.5, 1.0, {"x1": 3.0, "x2": -2.0}),
        ("m2", 0.3, 0.5, {"x1": 2.8, "x2": -1.5}),
        ("m3", 0.2, 2.0, {"x1": 3.2, "x2": -2.2}),
    ]
    models = []
    for mid, weight, intercept, coefs in specs:
        ref = None
        if with_predictors:
            ref = {"kind": "linear", "intercept": intercept, "coefficients": dict(coefs)}
        models.append(ModelEntry(
            id=mid, name=mid.upper(), weight=weight,
            predictions=_linear_outputs(intercept, coefs, ds.features),
            predictor_ref=ref,
        ))
    return EnsembleBundle(task=TaskKind.REGRESSION, dataset=ds, models=models)


def make_binary_bundle(n=60, seed=2, with_probabilities=True, with_predictors=True,
                       with_ensemble_prediction=False):
    rng = np.random.default_rng(seed)
    x1 = rng.uniform(-2, 2, n)
    x2 = rng.uniform(-2, 2, n)
    labels = ("no", "yes")
    truth = np.where(_sigmoid(1.5 * x1 - x2) + rng.normal(0, 0.2, n) > 0.5, "yes", "no")
    ds = Dataset(
        feature_names=("x1", "x2"),
        features={"x1": x1, "x2": x2},
        target=np.asarray(truth, dtype=object),
        feature_meta={"x1": FeatureMeta("x1", "numeric"), "x2": FeatureMeta("x2", "numeric")},
    )
    specs = [
        ("c1", 0.6, 0.0, {"x1": 1.4, "x2": -1.1}),
        ("c2", 0.4, 0.2, {"x1": 1.0, "x2": -0.7}),
    ]
    models = []
    for mid, weight, intercept, coefs in specs:
        pos = _sigmoid(_linear_outputs(intercept, coefs, ds.features))
        probs = np.column_stack([1.0 - pos, pos])
        preds = np.asarray([labels[int(i)] for i in np.argmax(probs, axis=1)], dtype=object)
        ref = None
        if with_predictors:
            ref = {"kind": "logistic", "intercept": intercept, "coefficients": dict(coefs)}
        models.append(ModelEntry(
            id=mid, name=mid.upper(), weight=weight,
            predictions=preds,
            probabilities=probs if with_probabilities else None,
            predictor_ref=ref,
        ))
    ensemble_prediction = None
    if with_ensemble_prediction:
        ensemble_prediction = models[0].predictions.copy()
    return EnsembleBundle(task=TaskKind.BINARY, dataset=ds, models=models,
                          class_labels=labels, ensemble_prediction=ensemble_prediction)


def make_multiclass_bundle(n=60, seed=3):
    rng = np.random.default_rng(seed)
    x1 = rng.uniform(-2, 2, n)
    x2 = rng.uniform(-2, 2, n)
    labels = ("a", "b", "c")
    ds_truth = np.asarray(labels, dtype=object)[rng.integers(0, 3, n)]
    ds = Dataset(
        feature_names=("x1", "x2"),
        features={"x1": x1, "x2": x2},
        target=ds_truth,
        feature_meta={"x1": FeatureMeta("x1", "numeric"), "x2": FeatureMeta("x2", "numeric")},
    )
    specs = [
        ("k1", 0.5, [0.0, 0.1, -0.1], [{"x1": 1.0}, {"x2": 1.0}, {"x1": -0.5, "x2": -0.5}]),
        ("k2", 0.3, [0.2, 0.0, 0.0], [{"x1": 0.8, "x2": 0.1}, {"x2": 0.9}, {"x1": -0.7}]),
        ("k3", 0.2, [0.0, 0.0, 0.3], [{"x1": 0.5}, {"x2": 0.5}, {"x1": 0.2, "x2": 0.2}]),
    ]
    models = []
    for mid, weight, intercepts, coef_list in specs:
        scores = np.column_stack([_linear_outputs(b, c, ds.features)
                                  for b, c in zip(intercepts, coef_list)])
        e = np.exp(scores - scores.max(axis=1, keepdims=True))
        probs = e / e.sum(axis=1, keepdims=True)
        preds = np.asarray(labels, dtype=object)[np.argmax(probs, axis=1)]
        models.append(ModelEntry(
            id=mid, name=mid.upper(), weight=weight,
            predictions=preds, probabilities=probs,
            predictor_ref={"kind": "logistic", "intercepts": intercepts,
                           "coefficients": coef_list},
        ))
    return EnsembleBundle(task=TaskKind.MULTICLASS, dataset=ds, models=models,
                          class_labels=labels)


def make_noise_bundle(n=300, seed=7):
    """Six-model regression fixture: four signal-tracking components and two
    pure-noise components, all starting at uniform weight."""
    rng = np.random.default_rng(seed)
    x1 = rng.uniform(-3, 3, n)
    x2 = rng.uniform(-3, 3, n)
    y = 2.0 * x1 - 1.0 * x2 + rng.normal(0, 0.3, n)
    ds = Dataset(
        feature_names=("x1", "x2"),
        features={"x1": x1, "x2": x2},
        target=y,
        feature_meta={"x1": FeatureMeta("x1", "numeric"), "x2": FeatureMeta("x2", "numeric")},
    )
    models = []
    for i, sd in enumerate((0.1, 0.2, 0.3, 0.4), start=1):
        models.append(ModelEntry(id=f"s{i}", name=f"signal-{i}", weight=1.0,
                                 predictions=y + rng.normal(0, sd, n)))
    scale = float(np.std(y))
    for i in (1, 2):
        models.append(ModelEntry(id=f"noise{i}", name=f"noise-{i}", weight=1.0,
                                 predictions=rng.normal(float(np.mean(y)), scale, n)))
    return EnsembleBundle(task=TaskKind.REGRESSION, dataset=ds, models=models)


@pytest.fixture
def regression_bundle():
    return make_regression_bundle()


@pytest.fixture
def binary_bundle():
    return make_binary_bundle()


@pytest.fixture
def multiclass_bundle():
    return make_multiclass_bundle()


@pytest.fixture
def noise_bundle():
    return make_noise_bundle()


@pytest.fixture
def regression_bundle_dir(tmp_path, regression_bundle):
    from ensemble_lens.bundle import save_bundle

    return save_bundle(regression_bundle, tmp_path / "regression_bundle")
