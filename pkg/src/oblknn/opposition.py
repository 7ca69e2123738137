"""
Opposition transforms.

The three data-augmentation schemes reflect each sample inside a per-feature
box ``[a, b]`` as ``a + b - x``; they differ only in where the box comes from:

* ``global``               min/max of the whole matrix
* ``classwise``            min/max of the sample's class
* ``localized_classwise``  min/max of the sample and its ``p`` nearest
                           same-class neighbours

:func:`oppose_variant` holds the generic opposition kernels from the
population-based optimisation literature (generalized, quasi, centroid,
current-optimum, dynamic, beta and reflection opposition). They work on bare
point populations and are not used by the classification pipeline.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (
    DimensionMismatch,
    FeatureBounds,
    LabeledDataset,
    MissingBounds,
    MissingPivot,
    OblError,
    as_matrix,
    euclidean_distances,
    frozen,
    make_rng,
)

SCHEME_KINDS = ("global", "classwise", "localized_classwise")
AUGMENT_MODES = ("augment", "replace")
VARIANT_KINDS = ("gobl", "qobl", "cobl", "coobl", "dobl", "beta_coobl", "robl")


@dataclass(frozen=True)
class OblScheme:
    kind: str = "global"
    p: int = 3

    def __post_init__(self):
        if self.kind not in SCHEME_KINDS:
            raise OblError(f"unknown OBL scheme {self.kind!r}; expected one of {SCHEME_KINDS}")
        if self.kind == "localized_classwise" and self.p < 1:
            raise OblError("localized scheme needs p >= 1")


@dataclass(frozen=True)
class VariantParams:
    """Parameters of :func:`oppose_variant`.

    ``k_scale=None`` makes GOBL draw its factor uniformly from [0, 1) per row.
    ``beta_a``/``beta_b`` and ``delta_sigma`` defaults are conventional picks,
    not values tied to any published experiment.
    """

    kind: str
    k_scale: Optional[float] = None
    eta: float = 1.0
    beta_a: float = 2.0
    beta_b: float = 2.0
    delta_sigma: float = 0.01
    pivot: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind not in VARIANT_KINDS:
            raise OblError(f"unknown variant {self.kind!r}; expected one of {VARIANT_KINDS}")
        if not (self.beta_a > 0 and self.beta_b > 0):
            raise OblError("beta shape parameters must be > 0")
        if not self.delta_sigma >= 0:
            raise OblError("delta_sigma must be >= 0")
        if self.pivot is not None:
            object.__setattr__(self, "pivot", frozen(np.asarray(self.pivot, dtype=np.float64).ravel()))


def compute_bounds(X) -> FeatureBounds:
    X = as_matrix(X)
    if X.shape[0] < 1:
        raise OblError("cannot bound an empty matrix")
    return FeatureBounds(X.min(axis=0), X.max(axis=0))


def oppose_global(X, bounds: FeatureBounds) -> np.ndarray:
    X = as_matrix(X)
    if X.shape[1] != bounds.n_features:
        raise DimensionMismatch(f"bounds cover {bounds.n_features} features, X has {X.shape[1]}")
    return (bounds.lower + bounds.upper) - X


def _class_rows(y: np.ndarray):
    for c in np.unique(y):
        yield c, np.flatnonzero(y == c)


def oppose_classwise(ds: LabeledDataset) -> LabeledDataset:
    X = ds.X
    out = np.empty_like(X)
    for _, rows in _class_rows(ds.y):
        part = X[rows]
        out[rows] = (part.min(axis=0) + part.max(axis=0)) - part
    return LabeledDataset(out, ds.y, ds.class_names, ds.feature_names, ds.name)


def local_neighbourhoods(X_class: np.ndarray, p: int) -> np.ndarray:
    """Indices (within the class block) of each row's ``p`` nearest other rows.

    Distance ties go to the lower row index. Returns shape ``(m, p)``; the
    caller guarantees ``m > p``.
    """
    D = euclidean_distances(X_class, X_class)
    np.fill_diagonal(D, np.inf)
    return np.argsort(D, axis=1, kind="stable")[:, :p]


def oppose_localized(ds: LabeledDataset, p: int = 3) -> LabeledDataset:
    """Reflect each row inside the box spanned by itself and its ``p`` nearest
    same-class neighbours; classes with ``p`` or fewer rows use the class box."""
    if p < 1:
        raise OblError("p must be >= 1")
    X = ds.X
    out = np.empty_like(X)
    for _, rows in _class_rows(ds.y):
        part = X[rows]
        if rows.size <= p:
            out[rows] = (part.min(axis=0) + part.max(axis=0)) - part
            continue
        nbrs = local_neighbourhoods(part, p)
        # (m, p+1, d): every row together with its neighbours
        boxes = np.concatenate([part[:, None, :], part[nbrs]], axis=1)
        out[rows] = (boxes.min(axis=1) + boxes.max(axis=1)) - part
    return LabeledDataset(out, ds.y, ds.class_names, ds.feature_names, ds.name)


def oppose(ds: LabeledDataset, scheme: OblScheme, bounds: Optional[FeatureBounds] = None) -> LabeledDataset:
    """Apply ``scheme`` to ``ds``; labels ride along with their source rows."""
    if scheme.kind == "global":
        if bounds is None:
            bounds = compute_bounds(ds.X)
        return LabeledDataset(oppose_global(ds.X, bounds), ds.y, ds.class_names, ds.feature_names, ds.name)
    if scheme.kind == "classwise":
        return oppose_classwise(ds)
    return oppose_localized(ds, scheme.p)


def oppose_variant(points, bounds: Optional[FeatureBounds], params: VariantParams, rng=0) -> np.ndarray:
    """Generic opposition kernels over a population of points.

    =============  =========================================================
    ``gobl``       ``k (a + b) - x``
    ``qobl``       uniform draw between the centre ``(a + b)/2`` and ``a + b - x``
    ``cobl``       ``2 c - x`` with ``c`` the population centroid
    ``coobl``      ``2 x* - x`` with ``x*`` the pivot
    ``dobl``       ``x + eta ((a + b - x) - x)``
    ``beta_coobl`` ``x* + beta (a + b - 2 x*)``, ``beta ~ Beta(beta_a, beta_b)``
    ``robl``       ``2 x* - x + delta``, ``delta ~ N(0, delta_sigma)``
    =============  =========================================================

    Random draws are per element (per row for the GOBL factor) and come only
    from ``rng``, so equal seeds give bit-identical output.
    """
    X = as_matrix(points)
    kind = params.kind
    gen = make_rng(rng)

    needs_bounds = kind in ("gobl", "qobl", "dobl", "beta_coobl")
    needs_pivot = kind in ("coobl", "beta_coobl", "robl")
    if needs_bounds:
        if bounds is None:
            raise MissingBounds(f"{kind} needs feature bounds")
        if bounds.n_features != X.shape[1]:
            raise DimensionMismatch(f"bounds cover {bounds.n_features} features, points have {X.shape[1]}")
        span = bounds.lower + bounds.upper
    if needs_pivot:
        if params.pivot is None:
            raise MissingPivot(f"{kind} needs a pivot point")
        if params.pivot.size != X.shape[1]:
            raise DimensionMismatch(f"pivot has {params.pivot.size} entries, points have {X.shape[1]}")
        pivot = params.pivot

    if kind == "gobl":
        if params.k_scale is None:
            k = gen.uniform(0.0, 1.0, size=(X.shape[0], 1))
        else:
            k = params.k_scale
        return k * span - X
    if kind == "qobl":
        centre = span / 2.0
        opposite = span - X
        u = gen.uniform(0.0, 1.0, size=X.shape)
        return centre + u * (opposite - centre)
    if kind == "cobl":
        return 2.0 * X.mean(axis=0) - X
    if kind == "coobl":
        return 2.0 * pivot - X
    if kind == "dobl":
        return X + params.eta * ((span - X) - X)
    if kind == "beta_coobl":
        beta = gen.beta(params.beta_a, params.beta_b, size=X.shape)
        return pivot + beta * (span - 2.0 * pivot)
    # robl
    delta = gen.normal(0.0, params.delta_sigma, size=X.shape) if params.delta_sigma > 0 else 0.0
    return 2.0 * pivot - X + delta


def write_pairs(ds: LabeledDataset, opposite: LabeledDataset, out) -> int:
    """Write originals and their opposites as one long CSV; returns data lines written."""
    d = ds.n_features
    n = 0
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["row_id", "kind", "class"] + [f"f{k}" for k in range(d)])
        for i in range(ds.n_samples):
            label = ds.class_names[ds.y[i]] if ds.class_names else int(ds.y[i])
            w.writerow([i, "original", label] + [repr(float(v)) for v in ds.X[i]])
            w.writerow([i, "opposite", label] + [repr(float(v)) for v in opposite.X[i]])
            n += 2
    return n


def export_pairs(ds: LabeledDataset, scheme: OblScheme, out) -> int:
    """Oppose ``ds`` under ``scheme`` and write the (original, opposite) pairs to ``out``."""
    return write_pairs(ds, oppose(ds, scheme), out)
