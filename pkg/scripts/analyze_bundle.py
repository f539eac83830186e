#!/usr/bin/env python3
"""One-shot console walkthrough of a bundle: metrics, the compatimetric
matrix most relevant to its task, and the most/least compatible pair."""

import argparse

from ensemble_lens.bundle import TaskKind, load_bundle
from ensemble_lens.compatimetrics import pair_detail, pair_matrix
from ensemble_lens.metrics import metrics_table


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--bundle", required=True)
    args = parser.parse_args()

    bundle = load_bundle(args.bundle)
    print(f"task={bundle.task.value}  n={bundle.n}  models={bundle.model_ids}\n")

    reports = metrics_table(bundle)
    names = list(reports[0].metrics)
    print(f"{'model':12s} " + " ".join(f"{n:>10s}" for n in names))
    for r in reports:
        cells = " ".join("       n/a" if r.metrics[n] is None else f"{r.metrics[n]:10.4f}"
                         for n in names)
        print(f"{r.model_id:12s} {cells}")

    metric = "rmsd" if bundle.task is TaskKind.REGRESSION else "uniformity"
    matrix = pair_matrix(bundle, metric)
    print(f"\npairwise {metric}:")
    print(" " * 8 + " ".join(f"{mid:>8s}" for mid in matrix.model_ids))
    for mid, row in zip(matrix.model_ids, matrix.values):
        print(f"{mid:8s}" + " ".join(f"{v:8.4f}" for v in row))

    pairs = [(matrix.values[i][j], a, b)
             for i, a in enumerate(matrix.model_ids)
             for j, b in enumerate(matrix.model_ids) if j > i]
    if pairs:
        closest = min(pairs) if bundle.task is TaskKind.REGRESSION else max(pairs)
        value, a, b = closest
        print(f"\nmost compatible pair: ({a}, {b}) at {metric}={value:.4f}")
        detail = pair_detail(bundle, a, b)
        for name, v in detail["metrics"].items():
            print(f"  {name:28s} {v:10.4f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
