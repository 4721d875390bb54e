"""Graph transduction game solved with discrete replicator dynamics.

Objects are players, classes are pure strategies. The partial payoff
between players i and j is the identity scaled by their similarity, so the
payoff of pure strategy h for player i reduces to

    u_i(h) = sum_{j != i} w_ij x_j(h)

once labeled players are held at their one-hot strategies. Each step
multiplies x_i(h) by u_i(h) / u_i(x) for every unlabeled player at once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy import sparse

from .dataset import PartialLabeling, PseudoLabelResult
from .errors import EmptyPrior, MaskConflict


@dataclass(frozen=True)
class GtgConfig:
    epsilon: float = 1e-5
    max_iterations: int = 100
    scale_k: int = 7
    sparsify_k: int = 0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if self.scale_k < 1:
            raise ValueError(f"scale_k must be >= 1, got {self.scale_k}")
        if self.sparsify_k < 0:
            raise ValueError(f"sparsify_k must be >= 0, got {self.sparsify_k}")


@dataclass
class PayoffState:
    utilities: np.ndarray  # (n, m): u_i(h)
    mixed: np.ndarray  # (n,):  u_i(x)


@dataclass
class GtgResult:
    strategies: np.ndarray
    iterations: int
    converged: bool
    residual: float
    stalled: np.ndarray
    trace: list[float] = field(default_factory=list)


def init_strategies(
    seeds: np.ndarray, m: int, prior_mask: Mapping[int, set] | None = None
) -> np.ndarray:
    """Initial strategy matrix.

    `seeds` holds a class index per object, -1 for unlabeled ones. Labeled
    rows are one-hot, unlabeled rows uniform, or uniform over the allowed
    classes in `prior_mask` (object position -> allowed class indices).
    """
    seeds = np.asarray(seeds)
    n = seeds.shape[0]
    X = np.full((n, m), 1.0 / m)
    labeled = seeds >= 0
    X[labeled] = 0.0
    X[np.flatnonzero(labeled), seeds[labeled]] = 1.0
    for pos, allowed in (prior_mask or {}).items():
        if seeds[pos] >= 0:
            raise MaskConflict(f"prior mask given for labeled object at position {pos}")
        allowed = sorted(set(allowed))
        if not allowed:
            raise EmptyPrior(f"empty allowed-class set for object at position {pos}")
        if allowed[0] < 0 or allowed[-1] >= m:
            raise ValueError(f"allowed classes {allowed} out of range for m={m}")
        X[pos] = 0.0
        X[pos, allowed] = 1.0 / len(allowed)
    return X


def compute_payoffs(graph, X: np.ndarray) -> PayoffState:
    """Pure-strategy and mixed payoffs for every player.

    `graph` must have a zero diagonal; dense arrays and scipy sparse
    matrices are both accepted.
    """
    U = graph @ X
    if sparse.issparse(U):
        U = U.toarray()
    U = np.asarray(U)
    return PayoffState(U, np.einsum("ih,ih->i", X, U))


def replicator_step(X: np.ndarray, payoffs: PayoffState, seeds: np.ndarray) -> np.ndarray:
    """One synchronous replicator update.

    Labeled rows and rows with zero mixed payoff are copied unchanged.
    Updated rows are renormalised to absorb rounding drift.
    """
    active = (np.asarray(seeds) < 0) & (payoffs.mixed > 0)
    nxt = X.copy()
    if np.any(active):
        rows = X[active] * payoffs.utilities[active] / payoffs.mixed[active, None]
        nxt[active] = rows / rows.sum(axis=1, keepdims=True)
    return nxt


def stalled_rows(payoffs: PayoffState, seeds: np.ndarray) -> np.ndarray:
    return (np.asarray(seeds) < 0) & ~(payoffs.mixed > 0)


def run_gtg(
    graph,
    seeds: np.ndarray,
    config: GtgConfig = GtgConfig(),
    prior_mask: Mapping[int, set] | None = None,
    m: int | None = None,
    X0: np.ndarray | None = None,
) -> GtgResult:
    """Iterate replicator dynamics until ``||X_{t+1} - X_t||_F <= epsilon``.

    Returns after `config.max_iterations` steps at the latest; hitting the
    cap is reported through ``converged=False``, not raised.
    """
    seeds = np.asarray(seeds)
    if X0 is None:
        if m is None:
            m = int(seeds.max()) + 1
        X = init_strategies(seeds, m, prior_mask)
    else:
        X = np.array(X0, dtype=np.float64)
    stalled = np.zeros(seeds.shape[0], dtype=bool)
    trace = []
    residual = np.inf
    converged = False
    it = 0
    for it in range(1, config.max_iterations + 1):
        payoffs = compute_payoffs(graph, X)
        stalled |= stalled_rows(payoffs, seeds)
        nxt = replicator_step(X, payoffs, seeds)
        residual = float(np.linalg.norm(nxt - X))
        trace.append(residual)
        X = nxt
        if residual <= config.epsilon:
            converged = True
            break
    return GtgResult(X, it, converged, residual, stalled, trace)


def extract_labels(X: np.ndarray, seeds: np.ndarray, stalled: np.ndarray | None = None):
    """Argmax labels, confidences and source flags.

    Ties go to the lowest class index (``np.argmax`` semantics).
    """
    seeds = np.asarray(seeds)
    labels = np.argmax(X, axis=1)
    confidence = X.max(axis=1)
    given = seeds >= 0
    labels[given] = seeds[given]
    confidence = np.where(given, 1.0, confidence)
    if stalled is None:
        stalled = np.zeros(seeds.shape[0], dtype=bool)
    source = tuple(
        "given" if g else ("unpropagated" if s else "propagated")
        for g, s in zip(given, stalled)
    )
    return labels, confidence, source


def propagate(
    features,
    labeling: PartialLabeling,
    config: GtgConfig = GtgConfig(),
    prior_mask: Mapping[str, set] | None = None,
    graph=None,
) -> tuple[PseudoLabelResult, GtgResult]:
    """Similarity graph, game and label extraction for a feature set."""
    from .similarity import similarity_graph

    if graph is None:
        graph = similarity_graph(features, config.scale_k, config.sparsify_k)
    seeds = labeling.seed_vector(features.ids)
    mask = None
    if prior_mask:
        mask = {features.index_of(obj): allowed for obj, allowed in prior_mask.items()}
    res = run_gtg(graph, seeds, config, prior_mask=mask, m=labeling.m)
    labels, conf, source = extract_labels(res.strategies, seeds, res.stalled)
    out = PseudoLabelResult(
        ids=features.ids,
        labels=labels,
        confidence=conf,
        source=source,
        iterations=res.iterations,
        converged=res.converged,
        residual=res.residual,
        strategies=res.strategies,
    )
    return out, res
