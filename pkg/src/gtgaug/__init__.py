"""Transductive label augmentation with graph transduction games."""

__version__ = "0.1.0"

from .dataset import (
    ClassCatalog,
    FeatureSet,
    PartialLabeling,
    PseudoLabelResult,
    read_features,
    read_labels,
    write_pseudo_labels,
    write_report,
)
from .gtg import GtgConfig, GtgResult, extract_labels, init_strategies, propagate, run_gtg
from .similarity import build_similarity, local_scales, pairwise_distances, sparsify_knn

__all__ = [
    "ClassCatalog",
    "FeatureSet",
    "GtgConfig",
    "GtgResult",
    "PartialLabeling",
    "PseudoLabelResult",
    "build_similarity",
    "extract_labels",
    "init_strategies",
    "local_scales",
    "pairwise_distances",
    "propagate",
    "read_features",
    "read_labels",
    "run_gtg",
    "sparsify_knn",
    "write_pseudo_labels",
    "write_report",
]
