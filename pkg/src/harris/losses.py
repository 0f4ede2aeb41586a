"""Ranking and regression loss primitives, plus the Kendall tau-b metric.

Cost vectors are "smaller is better" throughout: the cheapest algorithm gets
rank 1. Rankings are k-vectors of average ranks, so tied costs share the mean
of the rank positions they span and every ranking sums to k(k+1)/2.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.stats import kendalltau as _kendalltau
from scipy.stats import rankdata

from .errors import DomainError, UndefinedMetric

# A ranking is a k-vector of (possibly fractional) average ranks.
Ranking = np.ndarray


def rank_vector(costs) -> Ranking:
    """Average-rank transform of a cost vector; rank 1 = lowest cost."""
    return rankdata(np.asarray(costs, dtype=float), method="average")


def spearman_loss(r1: Ranking, r2: Ranking) -> float:
    """Spearman correlation of two rankings turned into a loss on [0, 1].

    Computed as (1 - rho) / 2 with rho the Pearson correlation of the rank
    vectors, which stays valid under ties. A constant rank vector (every
    algorithm tied) carries no ordering information, so the loss falls back
    to 0.5, the value of an uninformative ranking.
    """
    a = np.asarray(r1, dtype=float)
    b = np.asarray(r2, dtype=float)
    if a.shape != b.shape:
        raise DomainError(f"rank vectors differ in length: {a.size} vs {b.size}")
    if a.size < 2:
        raise DomainError("need at least two algorithms to compare rankings")
    a = a - a.mean()
    b = b - b.mean()
    ssa = float(a @ a)
    ssb = float(b @ b)
    if ssa == 0.0 or ssb == 0.0:
        return 0.5
    rho = float(a @ b) / math.sqrt(ssa * ssb)
    return (1.0 - rho) / 2.0


def mse_loss(y, y_hat) -> float:
    """Mean squared error between two cost vectors, averaged over algorithms."""
    a = np.asarray(y, dtype=float)
    b = np.asarray(y_hat, dtype=float)
    if a.shape != b.shape:
        raise DomainError(f"cost vectors differ in length: {a.size} vs {b.size}")
    d = a - b
    return float(d @ d) / a.size


def node_loss(labels, reg_label, rank_label: Ranking, lam: float,
              ranking_loss=spearman_loss, regression_loss=mse_loss) -> float:
    """Hybrid homogeneity loss of a set of cost vectors against node labels.

    lam weighs the ranking component (mean ranking_loss of each instance's
    ranking against rank_label), 1 - lam the regression component (mean
    regression_loss against reg_label). Endpoint values of lam skip the
    unused component entirely.
    """
    Y = np.atleast_2d(np.asarray(labels, dtype=float))
    if Y.shape[0] == 0:
        raise DomainError("node loss of an empty dataset is undefined")
    if not 0.0 <= lam <= 1.0:
        raise DomainError(f"lambda must lie in [0, 1], got {lam}")
    rank_term = 0.0
    if lam != 0.0:
        rank_term = float(np.mean([ranking_loss(rank_vector(y), rank_label) for y in Y]))
    reg_term = 0.0
    if lam != 1.0:
        reg_term = float(np.mean([regression_loss(y, reg_label) for y in Y]))
    return lam * rank_term + (1.0 - lam) * reg_term


def kendall_tau_b(r1: Ranking, r2: Ranking) -> float:
    """Kendall's tau-b between two rankings, with tie correction.

    Raises UndefinedMetric when either ranking is fully tied (the tie-corrected
    denominator vanishes); callers report such instances as missing.
    """
    a = np.asarray(r1, dtype=float)
    b = np.asarray(r2, dtype=float)
    if a.shape != b.shape:
        raise DomainError(f"rank vectors differ in length: {a.size} vs {b.size}")
    if a.size < 2:
        raise DomainError("need at least two algorithms to compare rankings")
    tau = float(_kendalltau(a, b, variant="b").statistic)
    if math.isnan(tau):
        raise UndefinedMetric("tau-b is undefined when a ranking is all-tied")
    return tau
