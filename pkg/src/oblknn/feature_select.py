"""
Filter feature selection: rank features by the mutual information between an
equal-width histogram of the feature and the class label, keep the top k.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .core import IndexOutOfRange, KOutOfRange, LengthMismatch, OblError, as_matrix, frozen


@dataclass(frozen=True)
class MiConfig:
    n_bins: int = 10
    bin_rule: str = "equal_width"

    def __post_init__(self):
        if self.n_bins < 2:
            raise OblError("n_bins must be >= 2")
        if self.bin_rule != "equal_width":
            raise OblError(f"unsupported bin rule {self.bin_rule!r}")


@dataclass(frozen=True)
class SelectionResult:
    selected: np.ndarray  # feature indices, best first
    scores: np.ndarray  # MI (nats) for every original feature

    def __post_init__(self):
        object.__setattr__(self, "selected", frozen(np.asarray(self.selected, dtype=np.int64)))
        object.__setattr__(self, "scores", frozen(np.asarray(self.scores, dtype=np.float64)))

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["feature_index", "mi_score"])
            for idx in self.selected:
                w.writerow([int(idx), repr(float(self.scores[idx]))])


def bin_feature(x: np.ndarray, n_bins: int) -> np.ndarray:
    """Equal-width bin index in ``0..n_bins-1``; a constant feature maps to bin 0."""
    lo, hi = x.min(), x.max()
    if hi == lo:
        return np.zeros(x.size, dtype=np.int64)
    idx = np.floor((x - lo) / (hi - lo) * n_bins).astype(np.int64)
    return np.minimum(idx, n_bins - 1)


def _mi_from_bins(bins: np.ndarray, labels: np.ndarray, n_bins: int, n_classes: int) -> float:
    n = labels.size
    joint = np.bincount(bins * n_classes + labels, minlength=n_bins * n_classes)
    joint = joint.reshape(n_bins, n_classes).astype(np.float64)
    pb = joint.sum(axis=1) / n
    pc = joint.sum(axis=0) / n
    pj = joint / n
    nz = pj > 0
    return float(np.sum(pj[nz] * np.log(pj[nz] / np.outer(pb, pc)[nz])))


def mutual_information(feature, labels, cfg: MiConfig = MiConfig()) -> float:
    """Histogram mutual information between one feature and the labels, in nats."""
    x = np.asarray(feature, dtype=np.float64).ravel()
    y = np.asarray(labels).ravel()
    if x.size != y.size:
        raise LengthMismatch(f"feature has {x.size} values, labels {y.size}")
    if x.size == 0:
        return 0.0
    y = np.unique(y, return_inverse=True)[1]
    return _mi_from_bins(bin_feature(x, cfg.n_bins), y, cfg.n_bins, int(y.max()) + 1)


def mi_scores(X, labels, cfg: MiConfig = MiConfig()) -> np.ndarray:
    X = as_matrix(X)
    y = np.asarray(labels).ravel()
    if X.shape[0] != y.size:
        raise LengthMismatch(f"X has {X.shape[0]} rows, labels {y.size}")
    y = np.unique(y, return_inverse=True)[1]
    n_classes = int(y.max()) + 1 if y.size else 1
    return np.array([
        _mi_from_bins(bin_feature(X[:, k], cfg.n_bins), y, cfg.n_bins, n_classes)
        for k in range(X.shape[1])
    ])


def select_top_k(X, labels, k: int, cfg: MiConfig = MiConfig()) -> SelectionResult:
    """Keep the ``k`` features with highest MI; ties go to the lower index."""
    X = as_matrix(X)
    if not 1 <= k <= X.shape[1]:
        raise KOutOfRange(f"k={k} outside 1..{X.shape[1]}")
    scores = mi_scores(X, labels, cfg)
    order = np.lexsort((np.arange(scores.size), -scores))
    return SelectionResult(order[:k], scores)


def project(X, sel: SelectionResult) -> np.ndarray:
    X = as_matrix(X)
    if sel.selected.size and (sel.selected.max() >= X.shape[1] or sel.selected.min() < 0):
        raise IndexOutOfRange(f"selection {sel.selected.tolist()} out of range for {X.shape[1]} features")
    return X[:, sel.selected]
