"""Command-line interface for training, evaluating, and reporting selectors."""

from __future__ import annotations

import csv
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .baselines import (ClusterSelector, HarrisSelector, OracleSelector,
                        PairwiseVotingSelector, RegressionForestSelector,
                        SingleBestSelector)
from .errors import (ConsistencyError, DomainError, EmptyScenarioError,
                     ModelFormatError, ParseError)
from .evaluation import (DEFAULT_DEPTH_GRID, DEFAULT_LAMBDA_GRID, average_rank,
                         best_cells_by_scenario, cross_validate, read_report_csv,
                         sweep, write_report_csv)
from .forest import (ForestConfig, fit_forest, load_forest, predict_costs,
                     save_forest, select_algorithm, single_tree_config)
from .scenario import (column_medians, filter_unsolved, impute_features,
                       par10_matrix, parse_scenario, scale_performances)
from .synthetic import make_synthetic_scenario
from .tree import TreeConfig

_USER_ERRORS = (ParseError, ConsistencyError, EmptyScenarioError, DomainError,
                ModelFormatError)

KNOWN_SELECTORS = ("harris", "rfr", "isac", "satzilla", "sbs", "oracle")


def _fail_on(func):
    """Turn domain/parse failures into clean nonzero exits."""
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except _USER_ERRORS as exc:
            raise click.ClickException(str(exc)) from exc
    wrapper.__name__ = func.__name__
    wrapper.__doc__ = func.__doc__
    return wrapper


def scenario_options(func):
    func = click.option("--scenario", "scenario_dir", type=click.Path(exists=True, file_okay=False),
                        default=None, help="ASLib-style scenario directory.")(func)
    func = click.option("--synthetic", is_flag=True,
                        help="Use the built-in seeded synthetic scenario instead of --scenario.")(func)
    func = click.option("--synthetic-n", type=int, default=500, show_default=True,
                        help="Synthetic scenario size.")(func)
    func = click.option("--synthetic-seed", type=int, default=0, show_default=True,
                        help="Synthetic scenario generator seed.")(func)
    func = click.option("--drop-unsolved/--keep-unsolved", default=True, show_default=True,
                        help="Drop instances no algorithm solves before training/evaluation.")(func)
    return func


def forest_options(func):
    func = click.option("--lambda", "lam", type=click.FloatRange(0.0, 1.0), default=0.5,
                        show_default=True, help="Weight of the ranking loss in split search.")(func)
    func = click.option("--depth", type=click.IntRange(min=0), default=6, show_default=True,
                        help="Maximum tree depth.")(func)
    func = click.option("--n-trees", type=click.IntRange(min=1), default=100, show_default=True,
                        help="Trees per hybrid forest.")(func)
    func = click.option("--bootstrap/--no-bootstrap", default=True, show_default=True,
                        help="Bootstrap-resample the training data per tree.")(func)
    func = click.option("--features-per-split", default="sqrt", show_default=True,
                        help="Features sampled per split: an integer, 'sqrt', or 'all'.")(func)
    func = click.option("--paper-tree", is_flag=True,
                        help="Preset: a single unbagged tree searching all features.")(func)
    func = click.option("--seed", type=int, default=0, show_default=True,
                        help="Seed for all randomized components.")(func)
    func = click.option("--threads", type=int, default=None,
                        help="Worker threads for tree building (default: $HARRIS_THREADS or 1).")(func)
    return func


def _parse_features_per_split(value):
    if value in ("all", "sqrt"):
        return value
    try:
        return int(value)
    except ValueError:
        raise click.BadParameter("--features-per-split must be an integer, 'sqrt', or 'all'")


def _load_scenario(scenario_dir, synthetic, synthetic_n, synthetic_seed, drop_unsolved):
    if synthetic:
        scn = make_synthetic_scenario(n_instances=synthetic_n, seed=synthetic_seed)
    elif scenario_dir is not None:
        scn = parse_scenario(scenario_dir)
    else:
        raise click.UsageError("provide --scenario DIR or --synthetic")
    if drop_unsolved:
        scn = filter_unsolved(scn)
    return scn


def _forest_config(lam, depth, n_trees, bootstrap, features_per_split, seed, paper_tree):
    if paper_tree:
        return single_tree_config(lam, depth, seed)
    return ForestConfig(
        n_trees=n_trees,
        bootstrap=bootstrap,
        seed=seed,
        tree=TreeConfig(lam=lam, max_depth=depth,
                        features_per_split=_parse_features_per_split(features_per_split)),
    )


def _selector_factories(names, forest_config, *, baseline_trees, baseline_depth,
                        isac_clusters, seed, threads):
    factories = {}
    for name in names:
        if name == "harris":
            factories[name] = lambda: HarrisSelector(forest_config, threads=threads)
        elif name == "rfr":
            factories[name] = lambda: RegressionForestSelector(
                n_trees=baseline_trees, max_depth=baseline_depth, seed=seed, threads=threads)
        elif name == "satzilla":
            factories[name] = lambda: PairwiseVotingSelector(
                n_trees=baseline_trees, max_depth=baseline_depth, seed=seed, threads=threads)
        elif name == "isac":
            factories[name] = lambda: ClusterSelector(n_clusters=isac_clusters, seed=seed)
        elif name == "sbs":
            factories[name] = lambda: SingleBestSelector()
        elif name == "oracle":
            factories[name] = lambda: OracleSelector()
        else:
            raise click.BadParameter(
                f"unknown selector {name!r}; choose from {', '.join(KNOWN_SELECTORS)}")
    return factories


def _fmt_cell(value, digits=2):
    return "-" if value is None else f"{value:.{digits}f}"


def _print_summary(scenario, aggregates):
    click.echo(f"scenario {scenario.name}: n={scenario.n_instances} "
               f"k={scenario.n_algorithms} p={scenario.n_features} cutoff={scenario.cutoff}")
    click.echo(f"{'selector':<12} {'PAR10 (mean +/- std)':<28} {'tau-b':>8}")
    for agg in aggregates:
        par10 = f"{agg.par10_mean:.2f} +/- {agg.par10_std:.2f}"
        click.echo(f"{agg.selector:<12} {par10:<28} {_fmt_cell(agg.tau_mean, 3):>8}")


@click.group()
@click.version_option(version=__version__, prog_name="harris")
def main():
    """Per-instance algorithm selection with hybrid ranking-regression forests."""


@main.command()
@scenario_options
@forest_options
@click.option("--selectors", default="harris,rfr,isac,satzilla", show_default=True,
              help="Comma-separated selector list.")
@click.option("--baseline-trees", type=click.IntRange(min=1), default=100, show_default=True,
              help="Trees per baseline sub-forest (rfr, satzilla).")
@click.option("--baseline-depth", type=click.IntRange(min=0), default=10, show_default=True,
              help="Tree depth for baseline sub-forests.")
@click.option("--isac-clusters", type=click.IntRange(min=1), default=10, show_default=True,
              help="Cluster count for the isac baseline.")
@click.option("--output", "-o", type=click.Path(dir_okay=False), default="evaluation.csv",
              show_default=True, help="Report CSV path.")
@_fail_on
def evaluate(scenario_dir, synthetic, synthetic_n, synthetic_seed, drop_unsolved,
             lam, depth, n_trees, bootstrap, features_per_split, paper_tree, seed, threads,
             selectors, baseline_trees, baseline_depth, isac_clusters, output):
    """Run 10-fold cross-validation for the requested selectors."""
    scn = _load_scenario(scenario_dir, synthetic, synthetic_n, synthetic_seed, drop_unsolved)
    config = _forest_config(lam, depth, n_trees, bootstrap, features_per_split, seed, paper_tree)
    names = [s.strip() for s in selectors.split(",") if s.strip()]
    factories = _selector_factories(names, config, baseline_trees=baseline_trees,
                                    baseline_depth=baseline_depth, isac_clusters=isac_clusters,
                                    seed=seed, threads=threads)
    fold_records, aggregates = [], []
    for name in names:
        annotate = name == "harris"
        folds, agg = cross_validate(scn, factories[name],
                                    lam=lam if annotate else None,
                                    depth=depth if annotate else None)
        fold_records.extend(folds)
        aggregates.append(agg)
    write_report_csv(output, fold_records, aggregates)
    _print_summary(scn, aggregates)
    click.echo(f"wrote {output}")


@main.command("sweep")
@scenario_options
@forest_options
@click.option("--lambdas", default=",".join(str(v) for v in DEFAULT_LAMBDA_GRID),
              show_default=True, help="Comma-separated lambda grid.")
@click.option("--depths", default=",".join(str(v) for v in DEFAULT_DEPTH_GRID),
              show_default=True, help="Comma-separated depth grid.")
@click.option("--output", "-o", type=click.Path(dir_okay=False), default="sweep.csv",
              show_default=True, help="Report CSV path.")
@_fail_on
def sweep_cmd(scenario_dir, synthetic, synthetic_n, synthetic_seed, drop_unsolved,
              lam, depth, n_trees, bootstrap, features_per_split, paper_tree, seed, threads,
              lambdas, depths, output):
    """Cross-validate the hybrid forest over a lambda x depth grid."""
    scn = _load_scenario(scenario_dir, synthetic, synthetic_n, synthetic_seed, drop_unsolved)
    try:
        lambda_grid = [float(v) for v in lambdas.split(",") if v.strip() != ""]
        depth_grid = [int(v) for v in depths.split(",") if v.strip() != ""]
    except ValueError:
        raise click.BadParameter("--lambdas/--depths must be comma-separated numbers")
    fold_records, aggregates = sweep(
        scn, lambda_grid, depth_grid,
        n_trees=n_trees, bootstrap=bootstrap,
        features_per_split=_parse_features_per_split(features_per_split),
        single_tree=paper_tree, seed=seed, threads=threads,
    )
    write_report_csv(output, fold_records, aggregates)
    best = min(aggregates, key=lambda a: a.par10_mean)
    click.echo(f"{len(aggregates)} grid cells written to {output}")
    click.echo(f"best cell: lambda={best.lam} depth={best.depth} "
               f"PAR10={best.par10_mean:.2f} +/- {best.par10_std:.2f}")


@main.command()
@scenario_options
@forest_options
@click.option("--model", "-o", type=click.Path(dir_okay=False), default="model.json",
              show_default=True, help="Where to write the fitted forest.")
@_fail_on
def train(scenario_dir, synthetic, synthetic_n, synthetic_seed, drop_unsolved,
          lam, depth, n_trees, bootstrap, features_per_split, paper_tree, seed, threads,
          model):
    """Fit a hybrid forest on a full scenario and save it as JSON."""
    scn = _load_scenario(scenario_dir, synthetic, synthetic_n, synthetic_seed, drop_unsolved)
    config = _forest_config(lam, depth, n_trees, bootstrap, features_per_split, seed, paper_tree)
    features = impute_features(scn.features, column_medians(scn.features))
    scaled, scale = scale_performances(par10_matrix(scn))
    forest = fit_forest(features, scaled, config, scale=scale,
                        algorithm_names=scn.algorithm_names, threads=threads)
    save_forest(forest, model)
    click.echo(f"trained {config.n_trees} tree(s) on {scn.name} "
               f"(n={scn.n_instances}, k={scn.n_algorithms}); wrote {model}")


@main.command()
@click.option("--model", "-m", type=click.Path(exists=True, dir_okay=False), required=True,
              help="Forest model written by `harris train`.")
@click.option("--features", "features_csv", type=click.Path(exists=True, dir_okay=False),
              required=True, help="CSV of feature vectors, one instance per row.")
@_fail_on
def predict(model, features_csv):
    """Select an algorithm for each feature vector in a CSV file."""
    forest = load_forest(model)
    with open(features_csv, newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise DomainError(f"{features_csv}: no feature rows")
    for row in rows:
        try:
            x = np.array([float(v) for v in row])
        except ValueError:
            raise DomainError(f"feature row is not numeric: {row!r}") from None
        if x.size != forest.n_features:
            raise DomainError(f"expected {forest.n_features} features, got {x.size}")
        if not np.all(np.isfinite(x)):
            raise DomainError("feature vectors must be finite (impute missing values first)")
        costs = forest.scale.invert(predict_costs(forest, x))
        choice = select_algorithm(forest, x)
        cost_text = ",".join(f"{c:.4f}" for c in costs)
        click.echo(f"{forest.algorithm_names[choice]}\t{cost_text}")


@main.command()
@click.argument("reports", nargs=-1, required=True,
                type=click.Path(exists=True, dir_okay=False))
@_fail_on
def report(reports):
    """Average-rank selectors across scenarios from evaluation/sweep CSVs.

    When a CSV holds several (lambda, depth) cells for a selector, the best
    PAR10 cell per scenario is used.
    """
    rows = []
    for path in reports:
        rows.extend(read_report_csv(path))
    table = best_cells_by_scenario(rows)
    if not table:
        raise DomainError("no aggregate rows found in the given reports")
    ranks = average_rank(table)
    selectors = sorted(ranks)
    click.echo(f"{'scenario':<24} " + " ".join(f"{s:>12}" for s in selectors))
    for scenario_name in sorted(table):
        cells = table[scenario_name]
        click.echo(f"{scenario_name:<24} "
                   + " ".join(f"{cells[s]:>12.2f}" for s in selectors))
    click.echo(f"{'average rank':<24} "
               + " ".join(f"{ranks[s]:>12.2f}" for s in selectors))


if __name__ == "__main__":
    sys.exit(main())
