"""Cross-validation harness, lambda/depth sweeps, and rank aggregation.

PAR10 is always reported in original seconds; selectors train on costs scaled
to [0, 1]. Scaling parameters and imputation medians are fit on the training
folds only, so no test information leaks into fitting. Kendall's tau-b is
computed per test instance between the selector's predicted cost ranking and
the true PAR10 ranking, then macro-averaged over the instances where it is
defined.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional, Sequence

import numpy as np

from .baselines import HarrisSelector, OracleSelector, Selector, oracle_select
from .errors import DomainError, UndefinedMetric
from .forest import ForestConfig, single_tree_config
from .losses import kendall_tau_b, rank_vector
from .scenario import Scenario, column_medians, impute_features, par10_matrix, scale_performances
from .tree import TreeConfig

DEFAULT_LAMBDA_GRID = tuple(i / 10 for i in range(11))
DEFAULT_DEPTH_GRID = (2, 4, 6, 8, 10)

REPORT_SCHEMA_VERSION = 1
REPORT_COLUMNS = (
    "scenario", "selector", "lambda", "depth", "fold", "row_type",
    "par10", "par10_std", "tau", "tau_std", "n_instances",
)


@dataclass(frozen=True)
class FoldRecord:
    scenario: str
    selector: str
    lam: Optional[float]
    depth: Optional[int]
    fold: int
    par10: float
    tau: Optional[float]
    n_instances: int


@dataclass(frozen=True)
class AggregateRecord:
    scenario: str
    selector: str
    lam: Optional[float]
    depth: Optional[int]
    par10_mean: float
    par10_std: float
    tau_mean: Optional[float]
    tau_std: Optional[float]
    n_instances: int


def cross_validate(scenario: Scenario, selector_factory: Callable[[], Selector], *,
                   lam: Optional[float] = None,
                   depth: Optional[int] = None) -> tuple[list[FoldRecord], AggregateRecord]:
    """Evaluate one selector under the scenario's fold split.

    For every fold: fit on the other folds (medians and scaling from training
    rows only), select on the test rows, and score the selected algorithm's
    PAR10 in original units plus the per-instance tau-b where defined.
    """
    costs = par10_matrix(scenario)
    folds = sorted(int(f) for f in np.unique(scenario.fold_of))
    fold_records: list[FoldRecord] = []
    selector_name = None

    for fold in folds:
        test_mask = scenario.fold_of == fold
        train_mask = ~test_mask
        if not train_mask.any():
            raise DomainError(f"fold {fold} leaves no training instances")
        medians = column_medians(scenario.features[train_mask])
        train_features = impute_features(scenario.features[train_mask], medians)
        test_features = impute_features(scenario.features[test_mask], medians)
        scaled_train, scale = scale_performances(costs[train_mask])

        selector = selector_factory()
        selector_name = selector.name
        is_oracle = isinstance(selector, OracleSelector)
        if not is_oracle:
            selector.fit(train_features, scaled_train, scale=scale,
                         algorithm_names=scenario.algorithm_names)

        fold_costs: list[float] = []
        fold_taus: list[float] = []
        for row, instance in enumerate(np.nonzero(test_mask)[0]):
            true_costs = costs[instance]
            if is_oracle:
                choice = oracle_select(true_costs)
                predicted = true_costs
            else:
                choice = selector.select(test_features[row])
                predicted = selector.predicted_costs(test_features[row])
            fold_costs.append(float(true_costs[choice]))
            if predicted is not None:
                try:
                    fold_taus.append(
                        kendall_tau_b(rank_vector(predicted), rank_vector(true_costs))
                    )
                except UndefinedMetric:
                    pass

        fold_records.append(FoldRecord(
            scenario=scenario.name,
            selector=selector_name,
            lam=lam,
            depth=depth,
            fold=fold,
            par10=float(np.mean(fold_costs)),
            tau=float(np.mean(fold_taus)) if fold_taus else None,
            n_instances=len(fold_costs),
        ))

    return fold_records, _aggregate(fold_records)


def _aggregate(fold_records: Sequence[FoldRecord]) -> AggregateRecord:
    first = fold_records[0]
    par10s = np.array([r.par10 for r in fold_records])
    taus = [r.tau for r in fold_records if r.tau is not None]
    return AggregateRecord(
        scenario=first.scenario,
        selector=first.selector,
        lam=first.lam,
        depth=first.depth,
        par10_mean=float(par10s.mean()),
        par10_std=float(par10s.std(ddof=1)) if par10s.size > 1 else 0.0,
        tau_mean=float(np.mean(taus)) if taus else None,
        tau_std=(float(np.std(taus, ddof=1)) if len(taus) > 1 else 0.0) if taus else None,
        n_instances=sum(r.n_instances for r in fold_records),
    )


def sweep(scenario: Scenario, lambdas: Iterable[float] = DEFAULT_LAMBDA_GRID,
          depths: Iterable[int] = DEFAULT_DEPTH_GRID, *,
          n_trees: int = 100, bootstrap: bool = True,
          features_per_split="sqrt", min_samples_split: int = 2,
          single_tree: bool = False, seed: int = 0,
          threads=None) -> tuple[list[FoldRecord], list[AggregateRecord]]:
    """Cross-validate the hybrid forest over the full lambda x depth grid.

    All cells share the scenario's fold split and the same seed, so the table
    isolates the effect of the two hyperparameters.
    """
    lambdas = list(lambdas)
    depths = list(depths)
    if not lambdas or not depths:
        raise DomainError("sweep grids must be nonempty")
    fold_records: list[FoldRecord] = []
    aggregates: list[AggregateRecord] = []
    for lam in lambdas:
        for depth in depths:
            if single_tree:
                config = single_tree_config(lam, depth, seed)
            else:
                config = ForestConfig(
                    n_trees=n_trees,
                    bootstrap=bootstrap,
                    seed=seed,
                    tree=TreeConfig(lam=lam, max_depth=depth,
                                    min_samples_split=min_samples_split,
                                    features_per_split=features_per_split),
                )
            folds, agg = cross_validate(
                scenario,
                lambda: HarrisSelector(config, threads=threads),
                lam=lam, depth=depth,
            )
            fold_records.extend(folds)
            aggregates.append(agg)
    return fold_records, aggregates


def average_rank(par10_by_scenario: Mapping[str, Mapping[str, float]]) -> dict[str, float]:
    """Average rank of each selector across scenarios (rank 1 = lowest mean
    PAR10 within a scenario; ties share averaged ranks)."""
    if not par10_by_scenario:
        raise DomainError("no scenarios to rank")
    selectors = sorted({s for cells in par10_by_scenario.values() for s in cells})
    totals = np.zeros(len(selectors))
    for scenario_name, cells in par10_by_scenario.items():
        missing = [s for s in selectors if s not in cells]
        if missing:
            raise DomainError(f"scenario {scenario_name!r} is missing selectors {missing}")
        totals += rank_vector([float(cells[s]) for s in selectors])
    means = totals / len(par10_by_scenario)
    return dict(zip(selectors, means))


# --- CSV report schema (version 1) -------------------------------------------

def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(float(value))  # plain-float repr even for numpy scalars
    return str(value)


def _fold_row(r: FoldRecord) -> list[str]:
    return [r.scenario, r.selector, _fmt(r.lam), _fmt(r.depth), str(r.fold), "fold",
            _fmt(r.par10), "", _fmt(r.tau), "", str(r.n_instances)]


def _aggregate_row(r: AggregateRecord) -> list[str]:
    return [r.scenario, r.selector, _fmt(r.lam), _fmt(r.depth), "", "aggregate",
            _fmt(r.par10_mean), _fmt(r.par10_std), _fmt(r.tau_mean), _fmt(r.tau_std),
            str(r.n_instances)]


def _sort_key(row: list[str]):
    return (row[0], row[1], row[2], row[3], row[5], int(row[4]) if row[4] else 0)


def write_report_csv(path, fold_records: Sequence[FoldRecord],
                     aggregates: Sequence[AggregateRecord]) -> None:
    """Write fold and aggregate rows in the documented column order.

    Rows are sorted deterministically, so identical inputs yield identical
    bytes; see README for the version-1 schema.
    """
    rows = [_fold_row(r) for r in fold_records] + [_aggregate_row(r) for r in aggregates]
    rows.sort(key=_sort_key)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(REPORT_COLUMNS)
        writer.writerows(rows)


def read_report_csv(path) -> list[dict[str, str]]:
    """Read a report CSV back as dict rows, validating the schema header."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != REPORT_COLUMNS:
            raise DomainError(f"unsupported report schema in {path}")
        return [dict(zip(REPORT_COLUMNS, row)) for row in reader]


def best_cells_by_scenario(rows: Iterable[dict[str, str]]) -> dict[str, dict[str, float]]:
    """Collapse aggregate report rows to the best PAR10 per (scenario,
    selector); with sweep output this realizes tuned-selection reporting."""
    table: dict[str, dict[str, float]] = {}
    for row in rows:
        if row["row_type"] != "aggregate":
            continue
        value = float(row["par10"])
        cells = table.setdefault(row["scenario"], {})
        name = row["selector"]
        if name not in cells or value < cells[name]:
            cells[name] = value
    return table
