"""
Train/test transaction for OBL-augmented KNN.

Training side, in order::

    impute -> scale -> [select top-k by MI] -> [oppose] -> [re-z-score opposites]
           -> assemble (augment: originals + opposites | replace: opposites) -> fit KNN

Test rows only ever see the training-side imputation statistics, scaler and
feature selection. They are never opposed.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import knn
from .core import DimensionMismatch, LabeledDataset, OblError, as_matrix, frozen
from .feature_select import MiConfig, SelectionResult, project, select_top_k
from .opposition import AUGMENT_MODES, OblScheme, oppose
from .preprocess import ImputePolicy, ScalerModel, apply_scaler, fill_values, fit_scaler, impute, incomplete_rows


@dataclass(frozen=True)
class PipelineConfig:
    scaler_kind: str = "zscore"
    impute: ImputePolicy = field(default_factory=ImputePolicy)
    n_select: Optional[int] = None
    scheme: Optional[OblScheme] = None
    mode: str = "augment"
    renormalize_opposites: bool = True
    k: int = 3
    weighted: bool = False
    seed: int = 0
    mi: MiConfig = field(default_factory=MiConfig)

    def __post_init__(self):
        if self.mode not in AUGMENT_MODES:
            raise OblError(f"unknown mode {self.mode!r}; expected one of {AUGMENT_MODES}")
        if self.n_select is not None and self.n_select < 1:
            raise OblError("n_select must be >= 1")

    def with_(self, **changes) -> "PipelineConfig":
        return replace(self, **changes)


@dataclass(frozen=True)
class FittedPipeline:
    n_raw_features: int
    fill: Optional[np.ndarray]
    scaler: ScalerModel
    selection: Optional[SelectionResult]
    opposite_scaler: Optional[ScalerModel]
    model: knn.KnnModel

    def transform(self, X) -> np.ndarray:
        """Map raw rows into the space the KNN model was trained in (no opposition)."""
        X = as_matrix(X)
        if X.shape[1] != self.n_raw_features:
            raise DimensionMismatch(f"pipeline fitted on {self.n_raw_features} raw features, got {X.shape[1]}")
        if self.fill is not None:
            X = np.where(np.isfinite(X), X, self.fill[None, :])
        X = apply_scaler(self.scaler, X)
        if self.selection is not None:
            X = project(X, self.selection)
        return X

    def predict(self, X) -> np.ndarray:
        return knn.predict(self.model, self.transform(X))


def _training_matrix(train: LabeledDataset, policy: ImputePolicy):
    X, y = train.X, train.y
    if policy.strategy == "drop_row":
        keep = ~incomplete_rows(X)
        X, y = X[keep], y[keep]
        if X.shape[0] == 0:
            raise OblError("drop_row imputation removed every training row")
        # test rows cannot be dropped; they are filled with training means
        fill = fill_values(X, "feature_mean")
    else:
        fill = fill_values(X, policy.strategy)
        X = impute(X, policy, stats_from=X)
    return X, y, fill


def fit_pipeline(train: LabeledDataset, cfg: PipelineConfig) -> FittedPipeline:
    X, y, fill = _training_matrix(train, cfg.impute)
    scaler = fit_scaler(cfg.scaler_kind, X)
    Z = apply_scaler(scaler, X)

    selection = None
    if cfg.n_select is not None:
        selection = select_top_k(Z, y, cfg.n_select, cfg.mi)
        Z = project(Z, selection)

    opposite_scaler = None
    train_x, train_y = Z, y
    if cfg.scheme is not None:
        base = LabeledDataset(Z, y, train.class_names)
        O = oppose(base, cfg.scheme).X
        if cfg.renormalize_opposites:
            opposite_scaler = fit_scaler("zscore", O)
            O = apply_scaler(opposite_scaler, O)
        if cfg.mode == "augment":
            train_x = np.vstack([Z, O])
            train_y = np.concatenate([y, y])
        else:
            train_x = O

    model = knn.KnnModel(train_x, train_y, cfg.k, cfg.weighted, train.n_classes)
    return FittedPipeline(train.n_features, frozen(fill), scaler, selection, opposite_scaler, model)


def predict_pipeline(fp: FittedPipeline, test_x) -> np.ndarray:
    return fp.predict(test_x)
