"""Labeled-fraction sweep comparing GTG with the first-order baselines.

Pseudo-label quality is measured on the unlabeled part of the training
split, which is what the propagators produce directly; no downstream
network is retrained on the augmented labels.
"""

from __future__ import annotations

from dataclasses import asdict
from typing import Sequence

import numpy as np

from .baselines import nearest_neighbor_propagate, predict_linear, train_linear_ovr
from .dataset import ClassCatalog, FeatureSet
from .evaluation import accuracy, confusion, macro_f1, relative_improvement
from .gtg import GtgConfig, propagate
from .synthetic import sample_partial_labeling, train_test_split

METHODS = ("gtg", "linear", "knn")
EVALUATION_NOTE = (
    "metrics measure pseudo-label quality on the unlabeled training remainder; "
    "no classifier is retrained on the pseudo-labels"
)


def _predict(method, features, labeling, config, linear_hyper, knn_k):
    if method == "gtg":
        result, res = propagate(features, labeling, config)
        return result.labels, res.iterations, res.converged
    if method == "linear":
        model = train_linear_ovr(features, labeling, **linear_hyper)
        pred = predict_linear(model, features)
        seeds = labeling.seed_vector(features.ids)
        pred = np.where(seeds >= 0, seeds, pred)
        return pred, model.hyper["epochs"], None
    if method == "knn":
        return nearest_neighbor_propagate(features, labeling, knn_k), None, None
    raise ValueError(f"unknown method {method!r}")


def run_experiment(
    features: FeatureSet,
    truth: np.ndarray,
    catalog: ClassCatalog,
    fractions: Sequence[float] = (0.02, 0.05, 0.10),
    methods: Sequence[str] = METHODS,
    seed: int = 0,
    config: GtgConfig = GtgConfig(),
    linear_hyper: dict | None = None,
    knn_k: int = 1,
    test_fraction: float = 0.30,
) -> list[dict]:
    """One report dict per (fraction, method) cell, in sweep order."""
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        raise ValueError(f"unknown method(s): {', '.join(unknown)}")
    linear_hyper = dict(learning_rate=0.01, epochs=200, l2=1e-4, seed=seed) | dict(
        linear_hyper or {}
    )
    truth = np.asarray(truth)
    train_ids, test_ids = train_test_split(features.ids, test_fraction, seed, truth)
    train = features.subset(train_ids)
    train_truth = truth[[features.index_of(i) for i in train_ids]]
    settings = {
        "gtg": asdict(config),
        "linear": linear_hyper,
        "knn": {"k": knn_k},
        "seed": seed,
        "test_fraction": test_fraction,
    }

    cells = []
    for fraction in fractions:
        labeling = sample_partial_labeling(train.ids, train_truth, catalog, fraction, seed)
        unl = np.array([i not in labeling.labeled for i in train.ids])
        row = {}
        for method in methods:
            pred, iterations, converged = _predict(
                method, train, labeling, config, linear_hyper, knn_k
            )
            p, t = pred[unl], train_truth[unl]
            row[method] = {
                "method": method,
                "labeled_fraction": fraction,
                "accuracy": accuracy(p, t),
                "macro_f1": macro_f1(p, t, catalog.m),
                "confusion": confusion(p, t, catalog.m),
                "iterations": iterations,
                "converged": converged,
                "config": settings,
                "n_seeds": len(labeling.labeled),
                "n_evaluated": int(unl.sum()),
                "n_train": len(train_ids),
                "n_test": len(test_ids),
                "classes": list(catalog.names),
                "evaluation": EVALUATION_NOTE,
            }
        if "gtg" in row:
            gains = {
                other: relative_improvement(row["gtg"]["accuracy"], row[other]["accuracy"])
                for other in methods
                if other != "gtg" and row[other]["accuracy"] > 0
            }
            row["gtg"]["relative_improvement"] = gains
        cells.extend(row[m] for m in methods)
    return cells


def summary_rows(cells: Sequence[dict]) -> list[tuple]:
    return [(c["labeled_fraction"], c["method"], c["accuracy"], c["macro_f1"]) for c in cells]
