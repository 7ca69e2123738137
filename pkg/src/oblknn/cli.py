"""Command line entry point: ``oblknn run | oppose | validate``."""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .core import LabeledDataset, OblError, validate_dataset
from .datasets import DatasetSpec, load_csv
from .harness import main_run
from .opposition import SCHEME_KINDS, OblScheme, export_pairs
from .preprocess import ImputePolicy, apply_scaler, fit_scaler, impute


def _dataset_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("dataset", help="CSV file")
    p.add_argument("--label-column", default="last", help="'last', a column name, or a 0-based index")
    p.add_argument("--delimiter", default=",")
    p.add_argument("--no-header", action="store_true", help="file has no header row")


def _spec(args) -> DatasetSpec:
    lc = args.label_column
    lc = int(lc) if lc.lstrip("-").isdigit() else lc
    name = os.path.splitext(os.path.basename(args.dataset))[0]
    return DatasetSpec(name, args.dataset, lc, args.delimiter, not args.no_header)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="oblknn", description="Opposition-based augmentation for KNN")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a benchmark grid from a config file")
    run.add_argument("config")
    run.add_argument("--output-dir")
    run.add_argument("--runs", type=int)
    run.add_argument("--folds", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--jobs", type=int)

    opp = sub.add_parser("oppose", help="export (original, opposite) row pairs as CSV")
    _dataset_args(opp)
    opp.add_argument("--scheme", choices=SCHEME_KINDS, default="global")
    opp.add_argument("--p", type=int, default=3, help="neighbours for the localized scheme")
    opp.add_argument("--zscore", action="store_true", help="impute and z-score before opposing")
    opp.add_argument("--out", required=True)

    val = sub.add_parser("validate", help="check a dataset against the data invariants")
    _dataset_args(val)
    return parser


def _cmd_oppose(args) -> int:
    ds = load_csv(_spec(args))
    if args.zscore:
        X = impute(ds.X, ImputePolicy("feature_mean"))
        X = apply_scaler(fit_scaler("zscore", X), X)
        ds = LabeledDataset(X, ds.y, ds.class_names, ds.feature_names, ds.name)
    problems = validate_dataset(ds)
    if problems:
        print(f"{args.dataset}: {len(problems)} problem(s), first: {problems[0]} (try --zscore to impute)",
              file=sys.stderr)
        return 2
    out_dir = os.path.dirname(os.path.abspath(args.out))
    os.makedirs(out_dir, exist_ok=True)
    n = export_pairs(ds, OblScheme(args.scheme, args.p), args.out)
    print(f"wrote {n} rows to {args.out}")
    return 0


def _cmd_validate(args) -> int:
    ds = load_csv(_spec(args))
    problems = validate_dataset(ds)
    print(f"{args.dataset}: {ds.n_samples} samples, {ds.n_features} features, {ds.n_classes} classes")
    for p in problems:
        print(f"  {p}")
    return 1 if problems else 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    logging.captureWarnings(True)
    if args.command == "run":
        overrides = {"output_dir": args.output_dir, "runs": args.runs, "folds": args.folds,
                     "seed": args.seed, "jobs": args.jobs}
        if args.output_dir:
            overrides["output_dir"] = os.path.abspath(args.output_dir)
        return main_run(args.config, overrides)
    try:
        if args.command == "oppose":
            return _cmd_oppose(args)
        return _cmd_validate(args)
    except (OSError, OblError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
