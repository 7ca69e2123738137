"""
Brute-force k-nearest-neighbours classifier, plain and distance-weighted.

Tie rules (all deterministic):

* neighbours at equal distance: lower training-row index first;
* plain vote tie: smaller summed neighbour distance, then lower class id;
* weighted vote: class with the largest sum of ``1 / (d + 1e-10)``, lower
  class id on exact ties; if any neighbour sits at distance 0 the prediction
  is the majority class among the zero-distance neighbours instead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DimensionMismatch, KTooLarge, LabeledDataset, LengthMismatch, OblError, as_matrix, euclidean_distances, frozen

WEIGHT_EPS = 1e-10
_QUERY_BLOCK = 512


@dataclass(frozen=True)
class KnnModel:
    train_x: np.ndarray
    train_y: np.ndarray
    k: int
    weighted: bool = False
    n_classes: int = 0

    def __post_init__(self):
        X = as_matrix(self.train_x, "train_x")
        y = np.asarray(self.train_y, dtype=np.int64).ravel()
        if X.shape[0] != y.size:
            raise LengthMismatch(f"{X.shape[0]} training rows but {y.size} labels")
        if self.k < 1:
            raise OblError("k must be >= 1")
        if self.k > X.shape[0]:
            raise KTooLarge(f"k={self.k} exceeds the {X.shape[0]} training samples")
        object.__setattr__(self, "train_x", frozen(X))
        object.__setattr__(self, "train_y", frozen(y))
        n_classes = max(self.n_classes, int(y.max()) + 1 if y.size else 0)
        object.__setattr__(self, "n_classes", n_classes)

    @property
    def n_features(self) -> int:
        return self.train_x.shape[1]

    def predict(self, X) -> np.ndarray:
        return predict(self, X)


def fit(train: LabeledDataset, k: int = 3, weighted: bool = False) -> KnnModel:
    """Store the training set (lazy learner); only validation happens here."""
    return KnnModel(train.X, train.y, k, weighted, train.n_classes)


def neighbours(model: KnnModel, Q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Indices and distances of the ``k`` nearest training rows, nearest first."""
    D = euclidean_distances(Q, model.train_x)
    idx = np.argsort(D, axis=1, kind="stable")[:, :model.k]
    return idx, np.take_along_axis(D, idx, axis=1)


def _vote(model: KnnModel, idx: np.ndarray, dist: np.ndarray) -> np.ndarray:
    nq = idx.shape[0]
    C = model.n_classes
    labels = model.train_y[idx]
    rows = np.arange(nq)
    # accumulate column by column so sums run in neighbour order
    counts = np.zeros((nq, C))
    summed = np.zeros((nq, C))
    weights = np.zeros((nq, C))
    for j in range(model.k):
        counts[rows, labels[:, j]] += 1.0
        summed[rows, labels[:, j]] += dist[:, j]
        if model.weighted:
            weights[rows, labels[:, j]] += 1.0 / (dist[:, j] + WEIGHT_EPS)

    if not model.weighted:
        best = counts == counts.max(axis=1, keepdims=True)
        sd = np.where(best, summed, np.inf)
        best &= sd == sd.min(axis=1, keepdims=True)
        return np.argmax(best, axis=1)

    pred = np.argmax(weights, axis=1)
    exact = dist[:, 0] == 0.0
    if exact.any():
        zero_counts = np.zeros((nq, C))
        for j in range(model.k):
            hit = dist[:, j] == 0.0
            zero_counts[rows[hit], labels[hit, j]] += 1.0
        pred = np.where(exact, np.argmax(zero_counts, axis=1), pred)
    return pred


def predict(model: KnnModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1) if X.size else X.reshape(0, model.n_features)
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise DimensionMismatch(f"model expects {model.n_features} features, got shape {X.shape}")
    out = np.empty(X.shape[0], dtype=np.int64)
    for start in range(0, X.shape[0], _QUERY_BLOCK):
        block = X[start:start + _QUERY_BLOCK]
        idx, dist = neighbours(model, block)
        out[start:start + block.shape[0]] = _vote(model, idx, dist)
    return out


def predict_one(model: KnnModel, q) -> int:
    q = np.asarray(q, dtype=np.float64).ravel()
    if q.size != model.n_features:
        raise DimensionMismatch(f"model expects {model.n_features} features, got {q.size}")
    return int(predict(model, q[None, :])[0])
