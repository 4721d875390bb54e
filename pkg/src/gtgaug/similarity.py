"""Locally-scaled similarity graph over a feature set.

Weights follow the self-tuning kernel

    w_ij = exp(-||f_i - f_j|| / (sigma_i * sigma_j))

with the *unsquared* Euclidean distance and sigma_i the distance from i to
its k-th nearest neighbour. The diagonal is zero so that a player never
receives payoff from itself.
"""

from __future__ import annotations

import numpy as np
from scipy import sparse
from scipy.spatial.distance import pdist, squareform

from .dataset import FeatureSet
from .errors import InvalidK

SIGMA_FLOOR = 1e-12
DEFAULT_SCALE_K = 7


def pairwise_distances(features: FeatureSet | np.ndarray) -> np.ndarray:
    """Dense n x n Euclidean distance matrix.

    Each unordered pair is evaluated once, so the result is exactly symmetric.
    """
    X = features.features if isinstance(features, FeatureSet) else np.asarray(features, float)
    if X.shape[0] == 1:
        return np.zeros((1, 1))
    return squareform(pdist(X, metric="euclidean"))


def local_scales(distances: np.ndarray, k: int = DEFAULT_SCALE_K) -> np.ndarray:
    """Distance from every point to its k-th nearest neighbour (self excluded)."""
    D = np.asarray(distances, dtype=np.float64)
    n = D.shape[0]
    if n < 2:
        raise InvalidK("local scaling needs at least 2 points")
    if not 1 <= k <= n - 1:
        raise InvalidK(f"scale k must be in [1, {n - 1}], got {k}")
    # partition along each row; the diagonal zero is always the smallest
    # entry, so the k-th neighbour sits at position k of the row order
    off = D + np.diag(np.full(n, -np.inf))
    kth = np.partition(off, k, axis=1)[:, k]
    return np.maximum(kth, SIGMA_FLOOR)


def build_similarity(distances: np.ndarray, scales: np.ndarray) -> np.ndarray:
    D = np.asarray(distances, dtype=np.float64)
    s = np.asarray(scales, dtype=np.float64)
    if D.shape != (s.shape[0], s.shape[0]):
        raise ValueError(f"distance matrix {D.shape} does not match {s.shape[0]} scales")
    W = np.exp(-D / np.outer(s, s))
    np.fill_diagonal(W, 0.0)
    return W


def sparsify_knn(graph: np.ndarray, k: int) -> sparse.csr_matrix:
    """Keep w_ij when j is among i's k heaviest edges or i among j's.

    Ties at the cut are resolved towards the lower neighbour index.
    """
    W = graph.toarray() if sparse.issparse(graph) else np.asarray(graph, dtype=np.float64)
    n = W.shape[0]
    if not 1 <= k <= n - 1:
        raise InvalidK(f"kNN k must be in [1, {n - 1}], got {k}")
    keep = np.zeros((n, n), dtype=bool)
    for i in range(n):
        others = np.delete(np.arange(n), i)
        order = others[np.argsort(-W[i, others], kind="stable")]
        keep[i, order[:k]] = True
    keep |= keep.T
    return sparse.csr_matrix(np.where(keep, W, 0.0))


def similarity_graph(
    features: FeatureSet | np.ndarray, scale_k: int = DEFAULT_SCALE_K, sparsify_k: int = 0
):
    """Distances, scales and weights in one call; dense unless `sparsify_k` > 0."""
    D = pairwise_distances(features)
    W = build_similarity(D, local_scales(D, scale_k))
    if sparsify_k:
        return sparsify_knn(W, sparsify_k)
    return W
