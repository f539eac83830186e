#!/usr/bin/env python3
"""Run the coordinate-ascent weight search on a bundle and show the result.

Prints the original and proposed weights side by side, the objective
trajectory, and the what-if deltas of the proposal.
"""

import argparse

from ensemble_lens.bundle import load_bundle
from ensemble_lens.weights import evaluate_weights, normalize_weights, suggest_weights


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--bundle", required=True)
    parser.add_argument("--objective", default="rmse")
    parser.add_argument("--budget", type=int, default=500)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    bundle = load_bundle(args.bundle)
    proposal = suggest_weights(bundle, args.objective, args.budget, seed=args.seed)
    original = normalize_weights(bundle.weights())

    print(f"objective {proposal.objective_name} "
          f"({'maximize' if proposal.maximize else 'minimize'}), "
          f"{proposal.evaluations_used} evaluations")
    print(f"baseline {proposal.baseline_value:.6f} -> proposal {proposal.objective_value:.6f}\n")
    print(f"{'model':12s} {'original':>10s} {'proposed':>10s}")
    for mid in bundle.model_ids:
        print(f"{mid:12s} {original[mid]:10.4f} {proposal.weights[mid]:10.4f}")

    print("\ntrajectory (evaluation -> best value):")
    for step, value in proposal.trajectory:
        print(f"  {step:5d}  {value:.6f}")

    report = evaluate_weights(bundle, proposal.weights)
    print("\nwhat-if deltas vs original weights:")
    for name, delta in report.deltas.items():
        print(f"  {name:10s} {'n/a' if delta is None else f'{delta:+.6f}'}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
