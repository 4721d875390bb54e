"""Gaussian blob datasets and the sampling used by the experiments.

All randomness comes from ``numpy.random.Generator`` with the PCG64 bit
generator seeded explicitly (``np.random.default_rng(seed)``); nothing reads
global random state. PCG64 output for a given seed is fixed by numpy's
stream-compatibility policy, so files generated here are reproducible
across platforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dataset import ClassCatalog, FeatureSet, PartialLabeling
from .errors import DegenerateClass


@dataclass(frozen=True)
class BlobSpec:
    n: int
    d: int
    m: int
    separation: float
    seed: int = 0

    def __post_init__(self):
        if self.m < 2 or self.n < self.m:
            raise ValueError(f"need n >= m >= 2, got n={self.n}, m={self.m}")
        if self.d < 1:
            raise ValueError("d must be >= 1")
        if not self.separation > 0:
            raise ValueError("separation must be > 0")


def class_names(m: int) -> list[str]:
    width = len(str(m - 1))
    return [f"c{h:0{width}d}" for h in range(m)]


def blob_centers(spec: BlobSpec, rng: np.random.Generator) -> np.ndarray:
    """Class centers at pairwise distance exactly `spec.separation`.

    With d >= m - 1 the centers are the vertices of a regular simplex under
    a random rotation; otherwise they are evenly spaced along a random
    direction.
    """
    m, d, sep = spec.m, spec.d, spec.separation
    if d >= m - 1:
        # centered unit vectors e_h span an (m-1)-dim subspace; express them
        # in an orthonormal basis of it, then rotate into R^d
        verts = np.eye(m) - 1.0 / m
        basis = np.linalg.svd(verts)[2][: m - 1]
        simplex = verts @ basis.T * (sep / math.sqrt(2.0))
        q, r = np.linalg.qr(rng.standard_normal((d, d)))
        q *= np.sign(np.diag(r))
        return np.pad(simplex, ((0, 0), (0, d - (m - 1)))) @ q.T
    direction = rng.standard_normal(d)
    direction /= np.linalg.norm(direction)
    steps = np.arange(m) - (m - 1) / 2.0
    return steps[:, None] * sep * direction[None, :]


def class_sizes(n: int, m: int) -> list[int]:
    return [n // m + (1 if h < n % m else 0) for h in range(m)]


def gaussian_blobs(spec: BlobSpec) -> tuple[FeatureSet, np.ndarray]:
    """Isotropic unit-variance blobs, objects in shuffled order."""
    rng = np.random.default_rng(spec.seed)
    centers = blob_centers(spec, rng)
    truth = np.repeat(np.arange(spec.m), class_sizes(spec.n, spec.m))
    X = centers[truth] + rng.standard_normal((spec.n, spec.d))
    order = rng.permutation(spec.n)
    width = len(str(spec.n - 1))
    ids = tuple(f"o{i:0{width}d}" for i in range(spec.n))
    return FeatureSet(ids, X[order]), truth[order]


def _check_classes(truth: np.ndarray, m: int) -> None:
    counts = np.bincount(truth, minlength=m)
    empty = np.flatnonzero(counts == 0)
    if empty.size:
        raise DegenerateClass(f"classes without objects: {empty.tolist()}")


def sample_partial_labeling(
    ids: Sequence[str],
    truth: np.ndarray,
    catalog: ClassCatalog,
    fraction: float,
    seed: int,
) -> PartialLabeling:
    """Stratified seeds: ceil(fraction * count_h) objects of every class h.

    Each class is shuffled with the same generator draw regardless of
    `fraction`, so for a fixed seed the seed sets are nested as the
    fraction grows.
    """
    if not 0 < fraction <= 1:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    truth = np.asarray(truth)
    _check_classes(truth, catalog.m)
    rng = np.random.default_rng(seed)
    labeled = {}
    for h in range(catalog.m):
        members = np.flatnonzero(truth == h)
        members = members[rng.permutation(members.size)]
        # the 1e-9 absorbs products like 0.1 * 30 == 3.0000000000000004
        take = min(members.size, math.ceil(fraction * members.size - 1e-9))
        for pos in members[:take]:
            labeled[ids[pos]] = h
    unlabeled = frozenset(i for i in ids if i not in labeled)
    return PartialLabeling(labeled, unlabeled, catalog)


def train_test_split(
    ids: Sequence[str],
    test_fraction: float = 0.30,
    seed: int = 0,
    truth: np.ndarray | None = None,
) -> tuple[list[str], list[str]]:
    """Seeded split; stratified by class when `truth` is given.

    Both parts keep the input order of `ids`.
    """
    if not 0 < test_fraction < 1:
        raise ValueError(f"test_fraction must be in (0, 1), got {test_fraction}")
    rng = np.random.default_rng(seed)
    n = len(ids)
    is_test = np.zeros(n, dtype=bool)
    if truth is None:
        perm = rng.permutation(n)
        is_test[perm[: int(round(test_fraction * n))]] = True
    else:
        truth = np.asarray(truth)
        for h in np.unique(truth):
            members = np.flatnonzero(truth == h)
            members = members[rng.permutation(members.size)]
            is_test[members[: int(round(test_fraction * members.size))]] = True
    train = [i for i, t in zip(ids, is_test) if not t]
    test = [i for i, t in zip(ids, is_test) if t]
    return train, test
