"""Classification metrics over integer class indices."""

from __future__ import annotations

import numpy as np

from .errors import EmptyEval, InvalidReference, ShapeError


def _check(pred, truth):
    pred = np.asarray(pred, dtype=np.int64)
    truth = np.asarray(truth, dtype=np.int64)
    if pred.shape != truth.shape or pred.ndim != 1:
        raise ShapeError(f"pred {pred.shape} and truth {truth.shape} differ")
    if pred.size == 0:
        raise EmptyEval("nothing to evaluate")
    return pred, truth


def accuracy(pred, truth) -> float:
    pred, truth = _check(pred, truth)
    return float(np.count_nonzero(pred == truth)) / pred.size


def confusion(pred, truth, m: int) -> np.ndarray:
    """Counts C[t, p] of objects with true class t predicted as p."""
    pred, truth = _check(pred, truth)
    if pred.min() < 0 or truth.min() < 0 or max(pred.max(), truth.max()) >= m:
        raise ShapeError(f"class index out of range for m={m}")
    return np.bincount(truth * m + pred, minlength=m * m).reshape(m, m)


def per_class_f1(cm: np.ndarray) -> np.ndarray:
    """F1 = 2TP / (2TP + FP + FN); 0 wherever the denominator vanishes."""
    tp = np.diag(cm).astype(np.float64)
    denom = cm.sum(axis=0) + cm.sum(axis=1)
    return np.divide(2.0 * tp, denom, out=np.zeros_like(tp), where=denom > 0)


def macro_f1(pred, truth, m: int) -> float:
    """Unweighted mean of per-class F1 over all m classes.

    Classes absent from both `pred` and `truth` count as 0.
    """
    return float(per_class_f1(confusion(pred, truth, m)).mean())


def relative_improvement(candidate: float, reference: float) -> float:
    if not reference > 0:
        raise InvalidReference(f"reference must be > 0, got {reference}")
    return (candidate - reference) / reference
