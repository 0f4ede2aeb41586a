import numpy as np
import pytest

from harris.baselines import (ClusterSelector, HarrisSelector, OracleSelector,
                              PairwiseVotingSelector, RegressionForestSelector,
                              SingleBestSelector, oracle_select)
from harris.errors import DomainError
from harris.forest import ForestConfig, HybridForest, single_tree_config
from harris.labels import NodeLabels
from harris.scenario import ScaleParams
from harris.synthetic import make_synthetic_scenario
from harris.tree import Leaf


def constant_forest(value):
    """Single-leaf forest predicting a fixed scalar (stub pairwise model)."""
    leaf = Leaf(NodeLabels(regression=np.array([value], dtype=float),
                           ranking=np.array([1.0])), size=1)
    return HybridForest(trees=(leaf,), config=ForestConfig(n_trees=1),
                        scale=ScaleParams(0.0, 1.0), algorithm_names=("d",),
                        n_features=1)


class TestRegressionForest:
    def test_dominant_algorithm_always_selected(self):
        rng = np.random.default_rng(0)
        X = rng.uniform(size=(30, 2))
        Y = np.column_stack([np.zeros(30), np.ones(30)])
        selector = RegressionForestSelector(n_trees=5, max_depth=2, seed=1).fit(X, Y)
        for i in range(0, 30, 5):
            assert selector.select(X[i]) == 0

    def test_constant_features_predict_training_means(self):
        X = np.ones((12, 3))
        rng = np.random.default_rng(4)
        Y = rng.uniform(size=(12, 2))
        selector = RegressionForestSelector(
            n_trees=3, max_depth=4, bootstrap=False, features_per_split="all", seed=0,
        ).fit(X, Y)
        assert selector.predicted_costs(np.ones(3)) == pytest.approx(Y.mean(axis=0))

    def test_matches_oracle_on_separable_fixture(self):
        scn = make_synthetic_scenario(120, seed=3)
        selector = RegressionForestSelector(n_trees=10, max_depth=4, seed=5)
        selector.fit(scn.features, scn.performances)
        hits = sum(selector.select(scn.features[i]) == int(np.argmin(scn.performances[i]))
                   for i in range(scn.n_instances))
        assert hits == scn.n_instances

    def test_empty_training_data(self):
        with pytest.raises(DomainError):
            RegressionForestSelector().fit(np.empty((0, 2)), np.empty((0, 2)))


class TestPairwiseVoting:
    def test_two_algorithms_dominant(self):
        rng = np.random.default_rng(0)
        X = rng.uniform(size=(30, 2))
        Y = np.column_stack([np.zeros(30), np.ones(30)])
        selector = PairwiseVotingSelector(n_trees=5, max_depth=2, seed=1).fit(X, Y)
        assert selector.select(X[0]) == 0

    def test_condorcet_winner_from_fixed_prediction_table(self):
        # pair diffs: (0,1) -> -1, (0,2) -> -1, (1,2) -> +1; votes 2/0/1
        selector = PairwiseVotingSelector()
        selector.n_algorithms = 3
        selector.models = [
            (0, 1, constant_forest(-1.0)),
            (0, 2, constant_forest(-1.0)),
            (1, 2, constant_forest(1.0)),
        ]
        assert selector.select(np.zeros(1)) == 0

    def test_all_zero_differences_select_lowest_index(self):
        selector = PairwiseVotingSelector()
        selector.n_algorithms = 3
        selector.models = [(i, j, constant_forest(0.0))
                           for i in range(3) for j in range(i + 1, 3)]
        assert selector.select(np.zeros(1)) == 0

    def test_predicted_costs_is_none(self):
        rng = np.random.default_rng(0)
        X = rng.uniform(size=(20, 2))
        Y = rng.uniform(size=(20, 2))
        selector = PairwiseVotingSelector(n_trees=2, max_depth=2, seed=0).fit(X, Y)
        assert selector.predicted_costs(X[0]) is None

    def test_single_algorithm_rejected(self):
        with pytest.raises(DomainError):
            PairwiseVotingSelector().fit(np.ones((4, 2)), np.ones((4, 1)))


class TestClusterSelector:
    def blobs(self):
        rng = np.random.default_rng(7)
        left = rng.normal(loc=-5.0, scale=0.3, size=(40, 2))
        right = rng.normal(loc=5.0, scale=0.3, size=(40, 2))
        X = np.vstack([left, right])
        # algorithm 0 cheap on the left blob, algorithm 1 cheap on the right
        Y = np.empty((80, 2))
        Y[:40] = [0.1, 0.9]
        Y[40:] = [0.9, 0.1]
        return X, Y

    def test_single_cluster_is_single_best(self):
        X, Y = self.blobs()
        selector = ClusterSelector(n_clusters=1, seed=0).fit(X, Y)
        sbs = SingleBestSelector().fit(X, Y)
        for x in (X[0], X[-1]):
            assert selector.select(x) == sbs.select(x)

    def test_separated_blobs_map_to_their_best(self):
        X, Y = self.blobs()
        selector = ClusterSelector(n_clusters=2, seed=0).fit(X, Y)
        assert selector.select(np.array([-5.0, 0.0])) == 0
        assert selector.select(np.array([5.0, 0.0])) == 1

    def test_nearest_centroid_tie_prefers_lowest_cluster(self):
        selector = ClusterSelector()
        selector.centroids = np.array([[-1.0], [1.0]])
        selector.cluster_best = np.array([1, 0])
        selector.cluster_costs = np.array([[0.2, 0.1], [0.1, 0.2]])
        selector.feature_mean = np.zeros(1)
        selector.feature_std = np.ones(1)
        assert selector.select(np.zeros(1)) == 1  # cluster 0 wins the tie

    def test_reduces_clusters_with_warning(self):
        X = np.arange(10.0).reshape(5, 2)
        Y = np.tile([0.3, 0.6], (5, 1))
        with pytest.warns(UserWarning, match="reducing clusters"):
            selector = ClusterSelector(n_clusters=10, seed=0).fit(X, Y)
        assert selector.centroids.shape[0] == 5

    def test_invariant_to_rescaling_a_feature_column(self):
        X, Y = self.blobs()
        X = np.floor(X * 256) / 256  # keep the affine map exact in floats
        rescaled = X.copy()
        rescaled[:, 0] = 64.0 * rescaled[:, 0]
        a = ClusterSelector(n_clusters=4, seed=3).fit(X, Y)
        b = ClusterSelector(n_clusters=4, seed=3).fit(rescaled, Y)
        for i in range(0, 80, 9):
            q = X[i].copy()
            q_rescaled = q.copy()
            q_rescaled[0] = 64.0 * q_rescaled[0]
            assert a.select(q) == b.select(q_rescaled)

    def test_predicted_costs_are_cluster_means(self):
        X, Y = self.blobs()
        selector = ClusterSelector(n_clusters=2, seed=0).fit(X, Y)
        costs = selector.predicted_costs(np.array([-5.0, 0.0]))
        assert costs == pytest.approx([0.1, 0.9])


class TestSingleBestAndOracle:
    def test_sbs_constant_choice(self):
        Y = np.tile([5.0, 2.0, 9.0], (4, 1))
        selector = SingleBestSelector().fit(np.zeros((4, 1)), Y)
        assert selector.select(np.array([0.0])) == 1
        assert selector.select(np.array([123.0])) == 1
        assert selector.predicted_costs(None) == pytest.approx([5.0, 2.0, 9.0])

    def test_oracle_select(self):
        assert oracle_select([3.0, 1.0, 2.0]) == 1

    def test_oracle_never_beaten(self):
        scn = make_synthetic_scenario(60, seed=11)
        selector = SingleBestSelector().fit(scn.features, scn.performances)
        for i in range(scn.n_instances):
            oracle_cost = scn.performances[i, oracle_select(scn.performances[i])]
            assert oracle_cost <= scn.performances[i, selector.select(scn.features[i])]

    def test_oracle_refuses_feature_selection(self):
        with pytest.raises(DomainError):
            OracleSelector().select(np.zeros(2))


class TestHarrisSelector:
    def test_fit_select_round_trip(self):
        scn = make_synthetic_scenario(100, seed=1)
        selector = HarrisSelector(single_tree_config(0.5, 2, seed=0))
        selector.fit(scn.features, scn.performances,
                     algorithm_names=scn.algorithm_names)
        assert selector.forest.algorithm_names == scn.algorithm_names
        hits = sum(selector.select(scn.features[i]) == int(np.argmin(scn.performances[i]))
                   for i in range(scn.n_instances))
        assert hits == scn.n_instances
        assert selector.predicted_costs(scn.features[0]).shape == (3,)
