"""Selectors evaluated by the harness.

Every selector is fit on imputed features and min-max-scaled PAR10 costs
(n x k, smaller is better) and answers select(x) with an algorithm index.
predicted_costs(x) returns a cost vector for rank-correlation metrics, or
None when the selector has no meaningful per-algorithm estimate.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .forest import ForestConfig, fit_forest, predict_costs, select_algorithm
from .scenario import ScaleParams
from .tree import TreeConfig


class Selector:
    name = "selector"

    def fit(self, features, costs, *, scale: ScaleParams | None = None,
            algorithm_names=None) -> "Selector":
        raise NotImplementedError

    def select(self, x) -> int:
        raise NotImplementedError

    def predicted_costs(self, x):
        return None


def _checked_training_data(features, costs):
    X = np.asarray(features, dtype=float)
    Y = np.atleast_2d(np.asarray(costs, dtype=float))
    if X.shape[0] == 0 or Y.shape[0] != X.shape[0]:
        raise DomainError("training data is empty or inconsistent")
    return X, Y


def _derived_seed(seed: int, index: int) -> int:
    ss = np.random.SeedSequence((int(seed) & 0xFFFFFFFFFFFFFFFF, index))
    return int(ss.generate_state(1, np.uint64)[0])


class HarrisSelector(Selector):
    """The hybrid-forest selector itself, wrapped for the harness."""

    name = "harris"

    def __init__(self, config: ForestConfig, threads=None):
        self.config = config
        self.threads = threads
        self.forest = None

    def fit(self, features, costs, *, scale=None, algorithm_names=None):
        X, Y = _checked_training_data(features, costs)
        self.forest = fit_forest(X, Y, self.config, scale=scale,
                                 algorithm_names=algorithm_names, threads=self.threads)
        return self

    def select(self, x) -> int:
        return select_algorithm(self.forest, x)

    def predicted_costs(self, x):
        return predict_costs(self.forest, x)


class RegressionForestSelector(Selector):
    """One regression forest per algorithm; select the predicted-cheapest.

    Sub-forests are hybrid forests at lambda = 0 on a single-column target,
    i.e. ordinary variance-reduction regression trees.
    """

    name = "rfr"

    def __init__(self, n_trees=100, max_depth=10, features_per_split="sqrt",
                 bootstrap=True, seed=0, threads=None):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.features_per_split = features_per_split
        self.bootstrap = bootstrap
        self.seed = seed
        self.threads = threads
        self.forests = None

    def _sub_config(self, index: int) -> ForestConfig:
        return ForestConfig(
            n_trees=self.n_trees,
            bootstrap=self.bootstrap,
            seed=_derived_seed(self.seed, index),
            tree=TreeConfig(lam=0.0, max_depth=self.max_depth,
                            features_per_split=self.features_per_split),
        )

    def fit(self, features, costs, *, scale=None, algorithm_names=None):
        X, Y = _checked_training_data(features, costs)
        self.forests = [
            fit_forest(X, Y[:, [j]], self._sub_config(j), threads=self.threads)
            for j in range(Y.shape[1])
        ]
        return self

    def predicted_costs(self, x):
        return np.array([float(predict_costs(f, x)[0]) for f in self.forests])

    def select(self, x) -> int:
        return int(np.argmin(self.predicted_costs(x)))


class PairwiseVotingSelector(Selector):
    """SATzilla-style voting on pairwise performance differences.

    For each unordered algorithm pair (i, j) a regression forest predicts
    cost_i - cost_j; a negative prediction votes for i, otherwise j. The
    algorithm with the most votes wins, ties going to the lowest index.
    """

    name = "satzilla"

    def __init__(self, n_trees=100, max_depth=10, features_per_split="sqrt",
                 bootstrap=True, seed=0, threads=None):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.features_per_split = features_per_split
        self.bootstrap = bootstrap
        self.seed = seed
        self.threads = threads
        self.models = None
        self.n_algorithms = None

    def fit(self, features, costs, *, scale=None, algorithm_names=None):
        X, Y = _checked_training_data(features, costs)
        k = Y.shape[1]
        if k < 2:
            raise DomainError("pairwise voting needs at least two algorithms")
        self.n_algorithms = k
        self.models = []
        pair_index = 0
        for i in range(k):
            for j in range(i + 1, k):
                diff = (Y[:, i] - Y[:, j])[:, None]
                config = ForestConfig(
                    n_trees=self.n_trees,
                    bootstrap=self.bootstrap,
                    seed=_derived_seed(self.seed, pair_index),
                    tree=TreeConfig(lam=0.0, max_depth=self.max_depth,
                                    features_per_split=self.features_per_split),
                )
                self.models.append((i, j, fit_forest(X, diff, config, threads=self.threads)))
                pair_index += 1
        return self

    def select(self, x) -> int:
        votes = np.zeros(self.n_algorithms, dtype=int)
        for i, j, forest in self.models:
            diff = float(predict_costs(forest, x)[0])
            if diff < 0.0:
                votes[i] += 1
            elif diff > 0.0:
                votes[j] += 1
            # an exactly-zero prediction carries no preference: no vote
        return int(np.argmax(votes))


class ClusterSelector(Selector):
    """ISAC-style selection: cluster z-scored features with k-means and pick
    each cluster's cheapest-on-average algorithm; queries go to the nearest
    centroid (ties to the lowest cluster index)."""

    name = "isac"

    def __init__(self, n_clusters=10, restarts=25, max_iter=100, seed=0):
        self.n_clusters = n_clusters
        self.restarts = restarts
        self.max_iter = max_iter
        self.seed = seed
        self.centroids = None
        self.cluster_best = None
        self.cluster_costs = None
        self.feature_mean = None
        self.feature_std = None

    def fit(self, features, costs, *, scale=None, algorithm_names=None):
        X, Y = _checked_training_data(features, costs)
        n = X.shape[0]
        k_clusters = self.n_clusters
        if n < k_clusters:
            warnings.warn(
                f"only {n} training rows; reducing clusters from {k_clusters} to {n}",
                stacklevel=2,
            )
            k_clusters = n

        self.feature_mean = X.mean(axis=0)
        std = X.std(axis=0)
        self.feature_std = np.where(std == 0.0, 1.0, std)
        Z = (X - self.feature_mean) / self.feature_std

        rng = np.random.default_rng(
            np.random.SeedSequence((int(self.seed) & 0xFFFFFFFFFFFFFFFF, 0x15AC))
        )
        self.centroids, assignment = _kmeans(Z, k_clusters, self.restarts, self.max_iter, rng)

        global_mean = Y.mean(axis=0)
        best, means = [], []
        for c in range(k_clusters):
            members = assignment == c
            cluster_mean = Y[members].mean(axis=0) if members.any() else global_mean
            means.append(cluster_mean)
            best.append(int(np.argmin(cluster_mean)))
        self.cluster_best = np.array(best)
        self.cluster_costs = np.array(means)
        return self

    def _nearest(self, x) -> int:
        z = (np.asarray(x, dtype=float) - self.feature_mean) / self.feature_std
        d2 = ((self.centroids - z) ** 2).sum(axis=1)
        return int(np.argmin(d2))

    def select(self, x) -> int:
        return int(self.cluster_best[self._nearest(x)])

    def predicted_costs(self, x):
        return self.cluster_costs[self._nearest(x)].copy()


def _kmeans(Z, k, restarts, max_iter, rng):
    """Plain Lloyd iterations with seeded restarts; lowest inertia wins."""
    n = Z.shape[0]
    best_inertia = np.inf
    best = None
    for _ in range(max(1, restarts)):
        centroids = Z[rng.choice(n, size=k, replace=False)].copy()
        assignment = np.zeros(n, dtype=int)
        for _ in range(max_iter):
            d2 = ((Z[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
            assignment = d2.argmin(axis=1)
            moved = False
            for c in range(k):
                members = assignment == c
                if members.any():
                    center = Z[members].mean(axis=0)
                else:
                    center = Z[rng.integers(0, n)]  # re-seed an empty cluster
                if not np.array_equal(center, centroids[c]):
                    centroids[c] = center
                    moved = True
            if not moved:
                break
        d2 = ((Z[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        assignment = d2.argmin(axis=1)
        inertia = float(d2[np.arange(n), assignment].sum())
        if inertia < best_inertia:
            best_inertia = inertia
            best = (centroids.copy(), assignment.copy())
    return best


class SingleBestSelector(Selector):
    """Constant selector: the algorithm with the best mean training cost."""

    name = "sbs"

    def __init__(self):
        self.mean_costs = None
        self.best = None

    def fit(self, features, costs, *, scale=None, algorithm_names=None):
        _, Y = _checked_training_data(features, costs)
        self.mean_costs = Y.mean(axis=0)
        self.best = int(np.argmin(self.mean_costs))
        return self

    def select(self, x) -> int:
        return self.best

    def predicted_costs(self, x):
        return self.mean_costs.copy()


class OracleSelector(Selector):
    """Evaluation-time reference: picks the true per-instance cheapest
    algorithm. The harness feeds it the test labels directly."""

    name = "oracle"

    def fit(self, features, costs, *, scale=None, algorithm_names=None):
        return self

    def select_from_costs(self, true_costs) -> int:
        return oracle_select(true_costs)

    def select(self, x) -> int:
        raise DomainError("the oracle selects from true costs, not features")


def oracle_select(true_costs) -> int:
    """Index of the truly cheapest algorithm for one instance."""
    return int(np.argmin(np.asarray(true_costs, dtype=float)))
