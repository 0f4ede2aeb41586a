#!/usr/bin/env python3
"""Cross-validate every selector on one scenario and print a summary table.

Points at an ASLib-style directory via --scenario, or falls back to the
seeded synthetic fixture. Useful as a quick end-to-end check that all
selectors train and land between the oracle and the timeout penalty.
"""

import argparse

from harris.baselines import (ClusterSelector, HarrisSelector, OracleSelector,
                              PairwiseVotingSelector, RegressionForestSelector,
                              SingleBestSelector)
from harris.evaluation import cross_validate
from harris.forest import ForestConfig
from harris.scenario import filter_unsolved, parse_scenario
from harris.synthetic import make_synthetic_scenario
from harris.tree import TreeConfig


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--scenario", default=None, help="ASLib-style directory")
    parser.add_argument("--instances", type=int, default=200, help="synthetic size")
    parser.add_argument("--lambda", dest="lam", type=float, default=0.5)
    parser.add_argument("--depth", type=int, default=4)
    parser.add_argument("--trees", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    if args.scenario:
        scenario = filter_unsolved(parse_scenario(args.scenario))
    else:
        scenario = make_synthetic_scenario(n_instances=args.instances, seed=args.seed)

    harris_config = ForestConfig(
        n_trees=args.trees, seed=args.seed,
        tree=TreeConfig(lam=args.lam, max_depth=args.depth, features_per_split="sqrt"))
    selectors = {
        "oracle": lambda: OracleSelector(),
        "harris": lambda: HarrisSelector(harris_config),
        "rfr": lambda: RegressionForestSelector(n_trees=args.trees, seed=args.seed),
        "isac": lambda: ClusterSelector(seed=args.seed),
        "satzilla": lambda: PairwiseVotingSelector(n_trees=args.trees, seed=args.seed),
        "sbs": lambda: SingleBestSelector(),
    }

    print(f"scenario {scenario.name}: n={scenario.n_instances} "
          f"k={scenario.n_algorithms} p={scenario.n_features}")
    print(f"{'selector':<10} {'PAR10':>12} {'+/-':>10} {'tau-b':>8}")
    for name, factory in selectors.items():
        _, agg = cross_validate(scenario, factory,
                                lam=args.lam if name == "harris" else None,
                                depth=args.depth if name == "harris" else None)
        tau = "-" if agg.tau_mean is None else f"{agg.tau_mean:.3f}"
        print(f"{name:<10} {agg.par10_mean:>12.2f} {agg.par10_std:>10.2f} {tau:>8}")


if __name__ == "__main__":
    main()
