"""Opposition-based data augmentation for k-nearest-neighbour classifiers."""

__version__ = "0.1.0"

from .core import FeatureBounds, LabeledDataset, OblError, validate_dataset
from .datasets import DatasetSpec, load_csv
from .evaluation import CvPlan, EvalReport, accuracy, cross_validate, f1_score, stratified_folds
from .feature_select import MiConfig, SelectionResult, mutual_information, project, select_top_k
from .knn import KnnModel, fit, predict, predict_one
from .opposition import (
    OblScheme,
    VariantParams,
    compute_bounds,
    export_pairs,
    oppose,
    oppose_classwise,
    oppose_global,
    oppose_localized,
    oppose_variant,
)
from .pipeline import FittedPipeline, PipelineConfig, fit_pipeline, predict_pipeline
from .preprocess import ImputePolicy, ScalerModel, apply_scaler, fit_scaler, impute
from .rankstats import FriedmanResult, ScoreMatrix, chi2_sf, friedman, rank_row

__all__ = [
    "FeatureBounds", "LabeledDataset", "OblError", "validate_dataset",
    "DatasetSpec", "load_csv",
    "CvPlan", "EvalReport", "accuracy", "cross_validate", "f1_score", "stratified_folds",
    "MiConfig", "SelectionResult", "mutual_information", "project", "select_top_k",
    "KnnModel", "fit", "predict", "predict_one",
    "OblScheme", "VariantParams", "compute_bounds", "export_pairs", "oppose",
    "oppose_classwise", "oppose_global", "oppose_localized", "oppose_variant",
    "FittedPipeline", "PipelineConfig", "fit_pipeline", "predict_pipeline",
    "ImputePolicy", "ScalerModel", "apply_scaler", "fit_scaler", "impute",
    "FriedmanResult", "ScoreMatrix", "chi2_sf", "friedman", "rank_row",
]
