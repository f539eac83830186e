#!/usr/bin/env python3
"""Generate synthetic demo bundles (regression, binary, noisy-ensemble).

The bundles land under --out as directories the CLI and service can load,
e.g. ``ensemble-lens metrics --bundle demo_bundles/regression``.
"""

import argparse
from pathlib import Path

import numpy as np

from ensemble_lens.bundle import (
    Dataset,
    EnsembleBundle,
    FeatureMeta,
    ModelEntry,
    TaskKind,
    save_bundle,
)


def linear_outputs(intercept, coefs, features):
    out = np.full(len(next(iter(features.values()))), float(intercept))
    for name, c in coefs.items():
        out = out + c * features[name]
    return out


def regression_bundle(n, rng):
    x1 = rng.uniform(-3, 3, n)
    x2 = rng.uniform(0, 5, n)
    seg = rng.choice(["a", "b"], n)
    y = 3.0 * x1 - 2.0 * x2 + 1.0 + rng.normal(0, 0.5, n)
    ds = Dataset(
        feature_names=("x1", "x2", "seg"),
        features={"x1": x1, "x2": x2, "seg": np.asarray(seg, dtype=object)},
        target=y,
        feature_meta={
            "x1": FeatureMeta("x1", "numeric"),
            "x2": FeatureMeta("x2", "numeric"),
            "seg": FeatureMeta("seg", "categorical", ("a", "b")),
        },
    )
    models = []
    for mid, weight, intercept, coefs in (
        ("m1", 0.5, 1.0, {"x1": 3.0, "x2": -2.0}),
        ("m2", 0.3, 0.5, {"x1": 2.8, "x2": -1.5}),
        ("m3", 0.2, 2.0, {"x1": 3.2, "x2": -2.2}),
    ):
        models.append(ModelEntry(
            id=mid, name=mid.upper(), weight=weight,
            predictions=linear_outputs(intercept, coefs, ds.features),
            predictor_ref={"kind": "linear", "intercept": intercept,
                           "coefficients": coefs},
        ))
    return EnsembleBundle(task=TaskKind.REGRESSION, dataset=ds, models=models)


def binary_bundle(n, rng):
    x1 = rng.uniform(-2, 2, n)
    x2 = rng.uniform(-2, 2, n)
    labels = ("no", "yes")
    truth = np.where(1.5 * x1 - x2 + rng.normal(0, 0.5, n) > 0, "yes", "no")
    ds = Dataset(
        feature_names=("x1", "x2"),
        features={"x1": x1, "x2": x2},
        target=np.asarray(truth, dtype=object),
        feature_meta={"x1": FeatureMeta("x1", "numeric"),
                      "x2": FeatureMeta("x2", "numeric")},
    )
    models = []
    for mid, weight, intercept, coefs in (
        ("c1", 0.6, 0.0, {"x1": 1.4, "x2": -1.1}),
        ("c2", 0.4, 0.2, {"x1": 1.0, "x2": -0.7}),
    ):
        score = linear_outputs(intercept, coefs, ds.features)
        pos = 1.0 / (1.0 + np.exp(-score))
        probs = np.column_stack([1.0 - pos, pos])
        preds = np.asarray(labels, dtype=object)[np.argmax(probs, axis=1)]
        models.append(ModelEntry(
            id=mid, name=mid.upper(), weight=weight,
            predictions=preds, probabilities=probs,
            predictor_ref={"kind": "logistic", "intercept": intercept,
                           "coefficients": coefs},
        ))
    return EnsembleBundle(task=TaskKind.BINARY, dataset=ds, models=models,
                          class_labels=labels)


def noisy_bundle(n, rng):
    x1 = rng.uniform(-3, 3, n)
    x2 = rng.uniform(-3, 3, n)
    y = 2.0 * x1 - x2 + rng.normal(0, 0.3, n)
    ds = Dataset(
        feature_names=("x1", "x2"),
        features={"x1": x1, "x2": x2},
        target=y,
        feature_meta={"x1": FeatureMeta("x1", "numeric"),
                      "x2": FeatureMeta("x2", "numeric")},
    )
    models = [ModelEntry(id=f"s{i}", name=f"signal-{i}", weight=1.0,
                         predictions=y + rng.normal(0, sd, n))
              for i, sd in enumerate((0.1, 0.2, 0.3, 0.4), start=1)]
    scale = float(np.std(y))
    models += [ModelEntry(id=f"noise{i}", name=f"noise-{i}", weight=1.0,
                          predictions=rng.normal(float(np.mean(y)), scale, n))
               for i in (1, 2)]
    return EnsembleBundle(task=TaskKind.REGRESSION, dataset=ds, models=models)


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default="demo_bundles")
    parser.add_argument("--n", type=int, default=200)
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    out = Path(args.out)
    for name, bundle in (("regression", regression_bundle(args.n, rng)),
                         ("binary", binary_bundle(args.n, rng)),
                         ("noisy", noisy_bundle(args.n, rng))):
        path = save_bundle(bundle, out / name)
        print(f"wrote {bundle.task.value} bundle with {len(bundle.models)} models -> {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
