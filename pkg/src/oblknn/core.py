"""
Shared data carriers, error types, and the exact Euclidean distance kernel.

Feature matrices are plain ``float64`` numpy arrays laid out sample-by-feature.
Labels are dense integer class ids ``0..C-1``; the original label strings live
in ``LabeledDataset.class_names``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np


class OblError(ValueError):
    """Base class for every domain error raised by this package."""


class DimensionMismatch(OblError):
    pass


class LengthMismatch(OblError):
    pass


class AllMissingFeature(OblError):
    def __init__(self, feature: int):
        super().__init__(f"feature {feature} has no finite value to compute a fill statistic from")
        self.feature = feature


class KOutOfRange(OblError):
    pass


class IndexOutOfRange(OblError):
    pass


class KTooLarge(OblError):
    pass


class MissingPivot(OblError):
    pass


class MissingBounds(OblError):
    pass


class NotBinary(OblError):
    pass


class EmptyInput(OblError):
    pass


class TooFewSamples(OblError):
    pass


class DegenerateInput(OblError):
    pass


def as_matrix(X, name: str = "X") -> np.ndarray:
    """Coerce to a 2-D float64 array (a copy is made only when needed)."""
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {arr.shape}")
    return arr


def frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.flags.writeable = False
    return arr


def make_rng(seed) -> np.random.Generator:
    """Generator for a 64-bit seed; a Generator passes through untouched."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(np.random.SeedSequence(int(seed) & 0xFFFFFFFFFFFFFFFF))


@dataclass(frozen=True)
class FeatureBounds:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=np.float64).ravel()
        upper = np.asarray(self.upper, dtype=np.float64).ravel()
        if lower.shape != upper.shape:
            raise DimensionMismatch(f"lower has {lower.size} entries, upper has {upper.size}")
        if np.any(lower > upper):
            raise OblError("lower bound exceeds upper bound")
        object.__setattr__(self, "lower", frozen(lower))
        object.__setattr__(self, "upper", frozen(upper))

    @property
    def n_features(self) -> int:
        return self.lower.size


@dataclass(frozen=True)
class LabeledDataset:
    """Feature matrix plus aligned dense class ids.

    Arrays are copied and made read-only on construction. Construction does not
    enforce the invariants (a freshly loaded file may still carry NaN markers);
    run :func:`validate_dataset` for diagnostics.
    """

    X: np.ndarray
    y: np.ndarray
    class_names: tuple = ()
    feature_names: Optional[tuple] = None
    name: str = field(default="", compare=False)

    def __post_init__(self):
        X = as_matrix(self.X)
        y = np.asarray(self.y)
        if y.dtype.kind == "f" and np.all(np.isfinite(y)) and np.all(y == np.round(y)):
            y = y.astype(np.int64)
        elif y.size == 0:
            y = y.astype(np.int64)
        object.__setattr__(self, "X", frozen(X))
        object.__setattr__(self, "y", frozen(y.ravel()))
        names = tuple(self.class_names)
        if not names and self.y.size and self.y.dtype.kind in "iu":
            names = tuple(str(c) for c in range(int(self.y.max()) + 1))
        object.__setattr__(self, "class_names", names)
        if self.feature_names is not None:
            object.__setattr__(self, "feature_names", tuple(self.feature_names))

    @property
    def n_samples(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def subset(self, rows) -> "LabeledDataset":
        rows = np.asarray(rows)
        return LabeledDataset(self.X[rows], self.y[rows], self.class_names, self.feature_names, self.name)

    def with_features(self, X) -> "LabeledDataset":
        return LabeledDataset(X, self.y, self.class_names, None, self.name)

    @classmethod
    def from_labels(cls, X, labels: Sequence, name: str = "") -> "LabeledDataset":
        """Densely re-encode arbitrary labels (sorted by their string form)."""
        raw = np.asarray([str(v) for v in labels])
        names, ids = np.unique(raw, return_inverse=True)
        return cls(X, ids.astype(np.int64), tuple(names.tolist()), name=name)


def validate_dataset(ds: LabeledDataset) -> list[str]:
    """List every invariant violation of ``ds``; an empty list means well-formed."""
    problems: list[str] = []
    X, y = ds.X, ds.y
    n, d = X.shape
    if n < 1:
        problems.append("n_samples must be >= 1")
    if d < 1:
        problems.append("n_features must be >= 1")
    bad = np.argwhere(~np.isfinite(X))
    for r, c in bad:
        problems.append(f"non-finite value at ({int(r)},{int(c)})")
    if y.shape[0] != n:
        problems.append(f"label vector has length {y.shape[0]} but matrix has {n} rows")
    if y.dtype.kind not in "iu":
        problems.append(f"labels must be integer class ids, got dtype {y.dtype}")
        return problems
    C = ds.n_classes
    for i in np.flatnonzero((y < 0) | (y >= C)):
        problems.append(f"label at row {int(i)} is {int(y[i])}, outside 0..{C - 1}")
    if y.size:
        present = np.bincount(y[(y >= 0) & (y < C)], minlength=C)
        for c in np.flatnonzero(present == 0):
            problems.append(f"class {int(c)} ({ds.class_names[c]!r}) has no samples")
    return problems


def euclidean_distances(Q: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Pairwise Euclidean distances, ``out[i, j] = ||Q[i] - X[j]||``.

    Squared differences are accumulated feature by feature, left to right, so
    identical point pairs always give bit-identical distances (the tie rules
    downstream rely on that) and the result matches a plain scalar loop.
    """
    Q = np.asarray(Q, dtype=np.float64)
    X = np.asarray(X, dtype=np.float64)
    if Q.ndim != 2 or X.ndim != 2 or Q.shape[1] != X.shape[1]:
        raise DimensionMismatch(f"query shape {Q.shape} incompatible with reference shape {X.shape}")
    acc = np.zeros((Q.shape[0], X.shape[0]))
    diff = np.empty_like(acc)
    for k in range(Q.shape[1]):
        np.subtract(Q[:, k, None], X[None, :, k], out=diff)
        diff *= diff
        acc += diff
    return np.sqrt(acc, out=acc)
