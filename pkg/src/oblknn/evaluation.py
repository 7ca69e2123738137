"""
Repeated stratified k-fold cross-validation and the reported metrics.
"""

from __future__ import annotations

import csv
import time
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import EmptyInput, LabeledDataset, LengthMismatch, NotBinary, OblError, TooFewSamples
from .pipeline import PipelineConfig, fit_pipeline

REPORT_COLUMNS = (
    "dataset", "algorithm", "scheme", "mode", "k", "p",
    "mean_acc", "mean_f1", "mean_runtime_s", "n_runs", "n_folds", "seed",
)


@dataclass(frozen=True)
class CvPlan:
    n_folds: int = 5
    n_runs: int = 30
    seed: int = 0

    def __post_init__(self):
        if self.n_folds < 2:
            raise OblError("n_folds must be >= 2")
        if self.n_runs < 1:
            raise OblError("n_runs must be >= 1")


@dataclass
class EvalReport:
    dataset_id: str
    algorithm_id: str
    accuracy: np.ndarray  # (n_runs, n_folds)
    f1: np.ndarray
    runtime_s: np.ndarray
    config: Optional[PipelineConfig] = None
    plan: Optional[CvPlan] = None
    extra: dict = field(default_factory=dict)

    @property
    def per_run_scores(self) -> np.ndarray:
        return self.accuracy

    @property
    def mean_accuracy(self) -> float:
        return float(np.mean(self.accuracy))

    @property
    def mean_f1(self) -> float:
        return float(np.mean(self.f1))

    @property
    def mean_runtime_s(self) -> float:
        return float(np.mean(self.runtime_s))

    def csv_row(self) -> list:
        cfg, plan = self.config, self.plan
        scheme = cfg.scheme.kind if cfg is not None and cfg.scheme is not None else "none"
        p = cfg.scheme.p if cfg is not None and cfg.scheme is not None and cfg.scheme.kind == "localized_classwise" else ""
        return [
            self.dataset_id, self.algorithm_id, scheme,
            cfg.mode if cfg is not None and cfg.scheme is not None else "",
            cfg.k if cfg is not None else "", p,
            f"{self.mean_accuracy:.4f}", f"{self.mean_f1:.4f}", f"{self.mean_runtime_s:.4f}",
            self.accuracy.shape[0], self.accuracy.shape[1],
            plan.seed if plan is not None else "",
        ]


def write_reports(reports, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(REPORT_COLUMNS)
        for r in reports:
            w.writerow(r.csv_row())


def stratified_folds(labels, plan: CvPlan, run_index: int = 0) -> np.ndarray:
    """Fold index per sample for one run.

    Each class is shuffled with a stream derived from ``(plan.seed, run_index)``
    and dealt round-robin into the folds. The dealing position carries over
    from one class to the next, which keeps total fold sizes within one of
    each other as well.
    """
    y = np.asarray(labels).ravel()
    n = y.size
    if n < plan.n_folds:
        raise TooFewSamples(f"{n} samples cannot fill {plan.n_folds} folds")
    rng = np.random.default_rng(np.random.SeedSequence([plan.seed & 0xFFFFFFFFFFFFFFFF, run_index]))
    fold_of = np.empty(n, dtype=np.int64)
    offset = 0
    small = []
    for c in np.unique(y):
        rows = np.flatnonzero(y == c)
        if rows.size < plan.n_folds:
            small.append(int(c))
        rows = rows[rng.permutation(rows.size)]
        fold_of[rows] = (offset + np.arange(rows.size)) % plan.n_folds
        offset = (offset + rows.size) % plan.n_folds
    if small:
        warnings.warn(f"classes {small} have fewer samples than folds; they are missing from some folds",
                      stacklevel=2)
    return fold_of


def _check_pair(pred, truth):
    pred = np.asarray(pred).ravel()
    truth = np.asarray(truth).ravel()
    if pred.size != truth.size:
        raise LengthMismatch(f"{pred.size} predictions vs {truth.size} labels")
    if truth.size == 0:
        raise EmptyInput("no predictions to score")
    return pred, truth


def accuracy(pred, truth) -> float:
    pred, truth = _check_pair(pred, truth)
    return float(np.count_nonzero(pred == truth)) / truth.size


def _f1_for(pred, truth, c) -> float:
    tp = np.count_nonzero((pred == c) & (truth == c))
    fp = np.count_nonzero((pred == c) & (truth != c))
    fn = np.count_nonzero((pred != c) & (truth == c))
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def f1_score(pred, truth, averaging: str = "macro") -> float:
    """F1 either for positive class 1 (``binary_positive``) or macro-averaged
    over the classes present in ``truth``; zero denominators count as 0."""
    pred, truth = _check_pair(pred, truth)
    if averaging == "binary_positive":
        if np.any((truth != 0) & (truth != 1)) or np.any((pred != 0) & (pred != 1)):
            raise NotBinary("binary_positive F1 needs labels in {0, 1}")
        return _f1_for(pred, truth, 1)
    if averaging != "macro":
        raise OblError(f"unknown F1 averaging {averaging!r}")
    classes = np.unique(truth)
    return float(np.mean([_f1_for(pred, truth, c) for c in classes]))


def default_averaging(n_classes: int) -> str:
    return "binary_positive" if n_classes == 2 else "macro"


def cross_validate(ds: LabeledDataset, cfg: PipelineConfig, plan: CvPlan,
                   algorithm_id: str = "", averaging: Optional[str] = None) -> EvalReport:
    """Run ``plan.n_runs`` reshuffled stratified k-fold passes of the pipeline.

    Runtime cells are wall-clock seconds of fit + predict for one fold,
    measured in the process doing the work.
    """
    averaging = averaging or default_averaging(ds.n_classes)
    shape = (plan.n_runs, plan.n_folds)
    acc, f1, runtime = np.zeros(shape), np.zeros(shape), np.zeros(shape)
    for run in range(plan.n_runs):
        with warnings.catch_warnings():
            if run:
                warnings.simplefilter("ignore")
            folds = stratified_folds(ds.y, plan, run)
        for f in range(plan.n_folds):
            test = folds == f
            train = ds.subset(np.flatnonzero(~test))
            t0 = time.perf_counter()
            fp = fit_pipeline(train, cfg)
            pred = fp.predict(ds.X[test])
            runtime[run, f] = time.perf_counter() - t0
            truth = ds.y[test]
            acc[run, f] = accuracy(pred, truth)
            f1[run, f] = f1_score(pred, truth, averaging)
    return EvalReport(ds.name, algorithm_id, acc, f1, runtime, cfg, plan)
