"""First-order label propagators used as comparison arms.

* a linear one-vs-rest max-margin classifier trained on the seed labels
  with stochastic subgradient descent on the L2-regularised hinge loss;
* a k-nearest-seed majority vote.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .dataset import FeatureSet, PartialLabeling
from .errors import InvalidK, NoSeeds, ShapeError


@dataclass
class LinearModel:
    weights: np.ndarray  # (m, d)
    bias: np.ndarray  # (m,)
    hyper: dict = field(default_factory=dict)
    missing_classes: tuple[int, ...] = ()
    objective_trace: list[float] = field(default_factory=list, repr=False)

    def scores(self, X: np.ndarray) -> np.ndarray:
        return X @ self.weights.T + self.bias


def _seed_arrays(features: FeatureSet, labeling: PartialLabeling):
    # FeatureSet order, so training does not depend on dict ordering
    rows = [i for i, obj in enumerate(features.ids) if obj in labeling.labeled]
    y = np.array([labeling.labeled[features.ids[i]] for i in rows], dtype=np.int64)
    return features.features[rows], y


def hinge_objective(W, b, X, Y, l2):
    """Mean OvR hinge loss plus (l2/2)*||W||^2; Y holds +-1 targets (n, m)."""
    margins = Y * (X @ W.T + b)
    return float(np.maximum(0.0, 1.0 - margins).sum(axis=1).mean() + 0.5 * l2 * (W * W).sum())


def train_linear_ovr(
    features: FeatureSet,
    labeling: PartialLabeling,
    learning_rate: float = 0.01,
    epochs: int = 200,
    l2: float = 1e-4,
    seed: int = 0,
) -> LinearModel:
    """One-vs-rest linear classifier fitted on the labeled objects only.

    Each epoch visits the seeds in a fresh permutation drawn from
    ``default_rng(seed)``; every class scorer is updated on every visit.
    Classes without seeds are trained on negatives only and listed in
    ``missing_classes``.
    """
    X, y = _seed_arrays(features, labeling)
    if y.size == 0:
        raise NoSeeds("no labeled objects to train on")
    m, d = labeling.m, features.d
    Y = np.where(y[:, None] == np.arange(m)[None, :], 1.0, -1.0)
    W = np.zeros((m, d))
    b = np.zeros(m)
    rng = np.random.default_rng(seed)
    trace = [hinge_objective(W, b, X, Y, l2)]
    for _ in range(epochs):
        for i in rng.permutation(y.size):
            yi = Y[i]
            active = yi * (W @ X[i] + b) < 1.0
            W *= 1.0 - learning_rate * l2
            W[active] += learning_rate * yi[active, None] * X[i][None, :]
            b[active] += learning_rate * yi[active]
        trace.append(hinge_objective(W, b, X, Y, l2))
    missing = tuple(int(h) for h in np.setdiff1d(np.arange(m), y))
    hyper = dict(learning_rate=learning_rate, epochs=epochs, l2=l2, seed=seed)
    return LinearModel(W, b, hyper, missing, trace)


def predict_linear(model: LinearModel, features: FeatureSet | np.ndarray) -> np.ndarray:
    X = features.features if isinstance(features, FeatureSet) else np.asarray(features, float)
    if X.ndim != 2 or X.shape[1] != model.weights.shape[1]:
        raise ShapeError(
            f"model expects {model.weights.shape[1]} features, got shape {X.shape}"
        )
    return np.argmax(model.scores(X), axis=1)


def nearest_neighbor_propagate(
    features: FeatureSet, labeling: PartialLabeling, k: int = 1
) -> np.ndarray:
    """Majority label among the k nearest seeds for every unlabeled object.

    Candidates are ordered by (distance, class, position); vote ties go to
    the lowest class index. Labeled objects keep their seed label.
    """
    seeds = labeling.seed_vector(features.ids)
    seed_pos = np.flatnonzero(seeds >= 0)
    if seed_pos.size == 0:
        raise NoSeeds("no labeled objects")
    if not 1 <= k <= seed_pos.size:
        raise InvalidK(f"k must be in [1, {seed_pos.size}], got {k}")
    out = seeds.copy()
    query = np.flatnonzero(seeds < 0)
    if query.size == 0:
        return out
    D = cdist(features.features[query], features.features[seed_pos])
    seed_cls = seeds[seed_pos]
    for row, q in enumerate(query):
        order = np.lexsort((seed_pos, seed_cls, D[row]))[:k]
        votes = np.bincount(seed_cls[order], minlength=labeling.m)
        out[q] = int(np.argmax(votes))
    return out
