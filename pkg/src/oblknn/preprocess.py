"""
Missing-value imputation and per-feature scaling with fit/apply kept apart.

Conventions (the usual ones, fixed here for reproducibility):

* z-score uses the population standard deviation (divide by n).
* the IQR uses linear interpolation between order statistics, i.e. the
  quantile at ``q`` sits at position ``q * (n - 1)`` of the sorted column.
* a feature whose std / range / IQR is zero keeps its center and gets scale 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import AllMissingFeature, DimensionMismatch, OblError, as_matrix, frozen

SCALER_KINDS = ("zscore", "minmax", "robust")
IMPUTE_STRATEGIES = ("feature_mean", "feature_median", "drop_row")


@dataclass(frozen=True)
class ImputePolicy:
    strategy: str = "feature_mean"

    def __post_init__(self):
        if self.strategy not in IMPUTE_STRATEGIES:
            raise OblError(f"unknown impute strategy {self.strategy!r}; expected one of {IMPUTE_STRATEGIES}")


@dataclass(frozen=True)
class ScalerModel:
    """Fitted per-feature ``center`` and strictly positive ``scale``."""

    kind: str
    center: np.ndarray
    scale: np.ndarray

    def __post_init__(self):
        if self.kind not in SCALER_KINDS:
            raise OblError(f"unknown scaler kind {self.kind!r}")
        center = np.asarray(self.center, dtype=np.float64).ravel()
        scale = np.asarray(self.scale, dtype=np.float64).ravel()
        if center.shape != scale.shape:
            raise DimensionMismatch("center and scale differ in length")
        if np.any(~(scale > 0)):
            raise OblError("scale entries must be > 0")
        object.__setattr__(self, "center", frozen(center))
        object.__setattr__(self, "scale", frozen(scale))

    @property
    def n_features(self) -> int:
        return self.center.size

    def to_text(self) -> str:
        """Key-value block; floats use ``repr`` so the round trip is exact."""
        return "\n".join([
            f"kind = {self.kind}",
            "center = " + " ".join(repr(float(v)) for v in self.center),
            "scale = " + " ".join(repr(float(v)) for v in self.scale),
        ]) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ScalerModel":
        fields = {}
        for line in text.splitlines():
            if "=" in line:
                key, value = line.split("=", 1)
                fields[key.strip()] = value.strip()
        return cls(
            kind=fields["kind"],
            center=np.array([float(v) for v in fields["center"].split()]),
            scale=np.array([float(v) for v in fields["scale"].split()]),
        )


def _quantile_linear(sorted_col: np.ndarray, q: float) -> float:
    pos = q * (sorted_col.size - 1)
    lo = int(np.floor(pos))
    hi = min(lo + 1, sorted_col.size - 1)
    frac = pos - lo
    return float(sorted_col[lo] + (sorted_col[hi] - sorted_col[lo]) * frac)


def fill_values(X, strategy: str = "feature_mean") -> np.ndarray:
    """Per-feature fill statistic over the finite cells of ``X``."""
    X = as_matrix(X)
    finite = np.isfinite(X)
    counts = finite.sum(axis=0)
    for k in np.flatnonzero(counts == 0):
        raise AllMissingFeature(int(k))
    if strategy == "feature_median":
        return np.array([np.median(X[finite[:, k], k]) for k in range(X.shape[1])])
    safe = np.where(finite, X, 0.0)
    return safe.sum(axis=0) / counts


def incomplete_rows(X) -> np.ndarray:
    """Boolean mask of rows holding at least one non-finite cell."""
    return ~np.all(np.isfinite(as_matrix(X)), axis=1)


def impute(X, policy: ImputePolicy = ImputePolicy(), stats_from=None) -> np.ndarray:
    """Replace non-finite cells of ``X``.

    Parameters
    ----------
    X : array of shape (n_samples, n_features)
    policy : ImputePolicy
        ``feature_mean`` / ``feature_median`` fill from ``stats_from`` (the
        training fold) or from ``X`` when ``stats_from`` is None. ``drop_row``
        removes incomplete rows, so the output may be shorter than ``X``; use
        :func:`incomplete_rows` to drop the matching labels.

    Raises
    ------
    AllMissingFeature
        A feature has no finite value to build its statistic from.
    """
    X = as_matrix(X)
    missing = ~np.isfinite(X)
    if policy.strategy == "drop_row":
        return X[~missing.any(axis=1)].copy()
    if not missing.any():
        return X.copy()
    src = X if stats_from is None else as_matrix(stats_from, "stats_from")
    if src.shape[1] != X.shape[1]:
        raise DimensionMismatch(f"stats_from has {src.shape[1]} features, X has {X.shape[1]}")
    fills = fill_values(src, policy.strategy)
    return np.where(missing, fills[None, :], X)


def fit_scaler(kind: str, X) -> ScalerModel:
    X = as_matrix(X)
    if kind == "zscore":
        center = X.mean(axis=0)
        scale = np.sqrt(((X - center) ** 2).mean(axis=0))
    elif kind == "minmax":
        center = X.min(axis=0)
        scale = X.max(axis=0) - center
    elif kind == "robust":
        cols = np.sort(X, axis=0)
        center = np.array([_quantile_linear(cols[:, k], 0.5) for k in range(X.shape[1])])
        q1 = np.array([_quantile_linear(cols[:, k], 0.25) for k in range(X.shape[1])])
        q3 = np.array([_quantile_linear(cols[:, k], 0.75) for k in range(X.shape[1])])
        scale = q3 - q1
    else:
        raise OblError(f"unknown scaler kind {kind!r}")
    # a constant column can still carry a rounding-noise std from its mean
    constant = X.max(axis=0) == X.min(axis=0)
    scale = np.where((scale > 0) & ~constant, scale, 1.0)
    return ScalerModel(kind, center, scale)


def apply_scaler(model: ScalerModel, X) -> np.ndarray:
    X = as_matrix(X)
    if X.shape[1] != model.n_features:
        raise DimensionMismatch(f"scaler fitted on {model.n_features} features, got {X.shape[1]}")
    return (X - model.center) / model.scale


def fit_apply(kind: str, X) -> tuple[ScalerModel, np.ndarray]:
    model = fit_scaler(kind, X)
    return model, apply_scaler(model, X)


def zscore(X, model: Optional[ScalerModel] = None) -> np.ndarray:
    """Convenience: standardize ``X`` with ``model`` or with its own statistics."""
    if model is None:
        model = fit_scaler("zscore", X)
    return apply_scaler(model, X)
