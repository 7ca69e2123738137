"""
Benchmark harness: run every (dataset, algorithm) cell of an experiment
through repeated cross-validation and write benchmark result tables.

Config files are INI-style::

    [experiment]
    output_dir = results
    folds = 5
    runs = 30
    seed = 2025
    scaler = zscore
    impute = feature_mean
    jobs = 1

    [dataset zoo]
    path = data/zoo.csv
    label_column = last
    n_select = 10

    [algorithm OBLKNN]
    k = 3
    weighted = false
    scheme = global
    mode = augment

Relative paths resolve against the config file's directory.
"""

from __future__ import annotations

import configparser
import csv
import logging
import os
import platform
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import OblError
from .datasets import DatasetSpec, load_csv
from .evaluation import CvPlan, EvalReport, cross_validate, write_reports
from .feature_select import MiConfig
from .opposition import OblScheme
from .pipeline import PipelineConfig
from .preprocess import ImputePolicy
from .rankstats import DegenerateInput, ScoreMatrix, friedman, write_friedman_csv

log = logging.getLogger(__name__)

METRICS = (("accuracy", True), ("f1", True), ("runtime", False))


class ConfigError(OblError):
    pass


@dataclass(frozen=True)
class AlgorithmSpec:
    id: str
    k: int = 3
    weighted: bool = False
    scheme: Optional[str] = None
    mode: str = "augment"
    p: int = 3
    renormalize_opposites: bool = True

    def pipeline_config(self, base: PipelineConfig, n_select: Optional[int]) -> PipelineConfig:
        scheme = OblScheme(self.scheme, self.p) if self.scheme else None
        return base.with_(k=self.k, weighted=self.weighted, scheme=scheme, mode=self.mode,
                          renormalize_opposites=self.renormalize_opposites, n_select=n_select)


@dataclass(frozen=True)
class ExperimentConfig:
    datasets: tuple
    algorithms: tuple
    cv: CvPlan = field(default_factory=CvPlan)
    output_dir: str = "results"
    base: PipelineConfig = field(default_factory=PipelineConfig)
    jobs: int = 1
    source_text: str = ""

    def __post_init__(self):
        if not self.datasets:
            raise ConfigError("experiment lists no datasets")
        if not self.algorithms:
            raise ConfigError("experiment lists no algorithms")
        ids = [a.id for a in self.algorithms]
        if len(set(ids)) != len(ids):
            raise ConfigError(f"duplicate algorithm ids in {ids}")
        dids = [d.id for d in self.datasets]
        if len(set(dids)) != len(dids):
            raise ConfigError(f"duplicate dataset ids in {dids}")


# the four-column roster of the KNN result tables
REFERENCE_ROSTER = (
    AlgorithmSpec("KNN", k=3),
    AlgorithmSpec("WKNN", k=3, weighted=True),
    AlgorithmSpec("OBLKNN", k=3, scheme="global"),
    AlgorithmSpec("WOBLKNN", k=3, weighted=True, scheme="global"),
)


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _delimiter(text: str) -> str:
    # ';' starts an inline comment, so such delimiters must be quoted
    t = text.strip()
    if len(t) >= 2 and t[0] == t[-1] and t[0] in "\"'":
        t = t[1:-1]
    elif t.lower() in ("tab", "\\t"):
        t = "\t"
    if len(t) != 1:
        raise ConfigError(f"delimiter must be one character (quote ';' as \";\"), got {text!r}")
    return t


def _opt_int(text: Optional[str]) -> Optional[int]:
    if text is None or text.strip().lower() in ("", "none"):
        return None
    return int(text)


def pipeline_to_section(cfg: PipelineConfig) -> dict:
    """Flatten a PipelineConfig into config-file keys (strings)."""
    return {
        "scaler": cfg.scaler_kind,
        "impute": cfg.impute.strategy,
        "n_select": "none" if cfg.n_select is None else str(cfg.n_select),
        "scheme": cfg.scheme.kind if cfg.scheme else "none",
        "p": str(cfg.scheme.p if cfg.scheme else 3),
        "mode": cfg.mode,
        "renormalize_opposites": str(cfg.renormalize_opposites).lower(),
        "k": str(cfg.k),
        "weighted": str(cfg.weighted).lower(),
        "seed": str(cfg.seed),
        "mi_bins": str(cfg.mi.n_bins),
    }


def pipeline_from_section(section) -> PipelineConfig:
    scheme = section.get("scheme", "none")
    scheme = None if scheme in ("", "none") else OblScheme(scheme, int(section.get("p", "3")))
    return PipelineConfig(
        scaler_kind=section.get("scaler", "zscore"),
        impute=ImputePolicy(section.get("impute", "feature_mean")),
        n_select=_opt_int(section.get("n_select")),
        scheme=scheme,
        mode=section.get("mode", "augment"),
        renormalize_opposites=_bool(section.get("renormalize_opposites", "true")),
        k=int(section.get("k", "3")),
        weighted=_bool(section.get("weighted", "false")),
        seed=int(section.get("seed", "0")),
        mi=MiConfig(int(section.get("mi_bins", "10"))),
    )


def parse_config(text: str, base_dir: str = ".", overrides: Optional[dict] = None) -> ExperimentConfig:
    """Parse config text; ``overrides`` replaces keys of the ``[experiment]`` section."""
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";",))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    exp = dict(cp["experiment"]) if cp.has_section("experiment") else {}
    exp.update({k: str(v) for k, v in (overrides or {}).items() if v is not None})

    def resolve(path):
        return path if os.path.isabs(path) else os.path.normpath(os.path.join(base_dir, path))

    datasets, algorithms = [], []
    try:
        for name in cp.sections():
            sec = cp[name]
            kind, _, ident = name.partition(" ")
            ident = ident.strip()
            if kind == "dataset":
                lc = sec.get("label_column", "last")
                datasets.append(DatasetSpec(
                    id=ident, path=resolve(sec["path"]),
                    label_column=int(lc) if lc.lstrip("-").isdigit() else lc,
                    delimiter=_delimiter(sec.get("delimiter", ",")),
                    has_header=_bool(sec.get("has_header", "true")),
                    n_select=_opt_int(sec.get("n_select")),
                ))
            elif kind == "algorithm":
                scheme = sec.get("scheme", "none")
                algorithms.append(AlgorithmSpec(
                    id=ident, k=int(sec.get("k", "3")), weighted=_bool(sec.get("weighted", "false")),
                    scheme=None if scheme in ("", "none") else scheme,
                    mode=sec.get("mode", "augment"), p=int(sec.get("p", "3")),
                    renormalize_opposites=_bool(sec.get("renormalize_opposites", "true")),
                ))
            elif kind != "experiment":
                raise ConfigError(f"unknown section [{name}]")
        seed = int(exp.get("seed", "0"))
        base = PipelineConfig(
            scaler_kind=exp.get("scaler", "zscore"),
            impute=ImputePolicy(exp.get("impute", "feature_mean")),
            seed=seed,
            mi=MiConfig(int(exp.get("mi_bins", "10"))),
        )
        for a in algorithms:
            a.pipeline_config(base, None)  # validates scheme and mode eagerly
        return ExperimentConfig(
            datasets=tuple(datasets), algorithms=tuple(algorithms),
            cv=CvPlan(int(exp.get("folds", "5")), int(exp.get("runs", "30")), seed),
            output_dir=resolve(exp.get("output_dir", "results")),
            base=base, jobs=int(exp.get("jobs", "1")), source_text=text,
        )
    except (KeyError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad config value: {exc}") from exc


def load_config(path: str, overrides: Optional[dict] = None) -> ExperimentConfig:
    with open(path) as fh:
        text = fh.read()
    return parse_config(text, os.path.dirname(os.path.abspath(path)), overrides)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    cells: dict  # (dataset_id, algorithm_id) -> EvalReport | Exception
    friedman: dict  # metric -> FriedmanResult | Exception

    @property
    def failed(self) -> list:
        return [key for key, v in self.cells.items() if not isinstance(v, EvalReport)]

    @property
    def exit_code(self) -> int:
        return 1 if self.failed else 0


def _run_cell(ds, cfg: PipelineConfig, plan: CvPlan, alg_id: str):
    try:
        return cross_validate(ds, cfg, plan, algorithm_id=alg_id)
    except Exception as exc:  # recorded per cell, never fatal for the grid
        return exc


def _metric_value(report: EvalReport, metric: str) -> float:
    return {"accuracy": report.mean_accuracy, "f1": report.mean_f1, "runtime": report.mean_runtime_s}[metric]


def _write_table(path, cfg: ExperimentConfig, cells: dict, metric: str) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["dataset"] + [a.id for a in cfg.algorithms])
        for d in cfg.datasets:
            row = [d.id]
            for a in cfg.algorithms:
                cell = cells[(d.id, a.id)]
                row.append(f"{_metric_value(cell, metric):.4f}" if isinstance(cell, EvalReport) else "FAILED")
            w.writerow(row)


def _manifest(cfg: ExperimentConfig, result: ExperimentResult) -> str:
    from . import __version__

    lines = [
        f"oblknn {__version__}",
        f"python {platform.python_version()}",
        f"numpy {np.__version__}",
        f"seed {cfg.cv.seed}",
        f"folds {cfg.cv.n_folds}",
        f"runs {cfg.cv.n_runs}",
        "",
        "[config]",
        cfg.source_text.rstrip(),
        "",
        "[failures]",
    ]
    for key in result.failed:
        err = result.cells[key]
        lines.append(f"{key[0]} / {key[1]}: {type(err).__name__}: {err}")
    return "\n".join(lines) + "\n"


def run_experiment(cfg: ExperimentConfig, write: bool = True) -> ExperimentResult:
    loaded = {}
    for d in cfg.datasets:
        try:
            loaded[d.id] = load_csv(d)
        except Exception as exc:
            log.error("dataset %s failed to load: %s", d.id, exc)
            loaded[d.id] = exc

    jobs = []
    cells = {}
    for d in cfg.datasets:
        for a in cfg.algorithms:
            ds = loaded[d.id]
            if isinstance(ds, Exception):
                cells[(d.id, a.id)] = ds
                continue
            jobs.append(((d.id, a.id), (ds, a.pipeline_config(cfg.base, d.n_select), cfg.cv, a.id)))

    if cfg.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            futures = [(key, pool.submit(_run_cell, *args)) for key, args in jobs]
            for key, fut in futures:
                cells[key] = fut.result()
    else:
        for key, args in jobs:
            log.info("running %s / %s", *key)
            cells[key] = _run_cell(*args)

    stats = {}
    ok_rows = [d.id for d in cfg.datasets
               if all(isinstance(cells[(d.id, a.id)], EvalReport) for a in cfg.algorithms)]
    for metric, higher in METRICS:
        values = [[_metric_value(cells[(d, a.id)], metric) for a in cfg.algorithms] for d in ok_rows]
        try:
            stats[metric] = friedman(ScoreMatrix(np.array(values).reshape(len(ok_rows), len(cfg.algorithms)), higher))
        except DegenerateInput as exc:
            stats[metric] = exc

    result = ExperimentResult(cfg, cells, stats)
    if write:
        write_outputs(result)
    return result


def write_outputs(result: ExperimentResult) -> None:
    cfg = result.config
    os.makedirs(cfg.output_dir, exist_ok=True)
    for metric, _ in METRICS:
        _write_table(os.path.join(cfg.output_dir, f"{metric}.csv"), cfg, result.cells, metric)
    write_friedman_csv(os.path.join(cfg.output_dir, "friedman.csv"), result.friedman,
                       [a.id for a in cfg.algorithms])
    write_reports([v for v in result.cells.values() if isinstance(v, EvalReport)],
                  os.path.join(cfg.output_dir, "reports.csv"))
    with open(os.path.join(cfg.output_dir, "manifest.txt"), "w") as fh:
        fh.write(_manifest(cfg, result))


def main_run(path: str, overrides: Optional[dict] = None) -> int:
    try:
        cfg = load_config(path, overrides)
    except (OSError, OblError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        result = run_experiment(cfg)
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2
    for key in result.failed:
        print(f"cell failed: {key[0]} / {key[1]}: {result.cells[key]}", file=sys.stderr)
    return result.exit_code
