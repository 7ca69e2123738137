"""CSV ingestion into :class:`LabeledDataset`."""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .core import LabeledDataset, OblError

MISSING_TOKENS = frozenset({"", "na", "?", "nan"})


class DatasetError(OblError):
    pass


class RaggedRows(DatasetError):
    def __init__(self, line: int, expected: int, got: int):
        super().__init__(f"line {line}: expected {expected} cells, found {got}")
        self.line = line


class UnparseableCell(DatasetError):
    def __init__(self, line: int, col: int, text: str):
        super().__init__(f"line {line}, column {col}: cannot parse {text!r} as a number")
        self.line = line
        self.col = col


class EmptyDataset(DatasetError):
    pass


@dataclass(frozen=True)
class DatasetSpec:
    id: str
    path: str
    label_column: Union[str, int] = "last"
    delimiter: str = ","
    has_header: bool = True
    n_select: Optional[int] = None


def _label_index(label_column, header: Optional[list], n_cols: int) -> int:
    if label_column == "last":
        return n_cols - 1
    if isinstance(label_column, int) or (isinstance(label_column, str) and label_column.lstrip("-").isdigit()):
        idx = int(label_column)
        if idx < 0:
            idx += n_cols
        if not 0 <= idx < n_cols:
            raise DatasetError(f"label column index {label_column} outside 0..{n_cols - 1}")
        return idx
    if header is None or label_column not in header:
        raise DatasetError(f"label column {label_column!r} not found in header")
    return header.index(label_column)


def load_csv(spec: DatasetSpec) -> LabeledDataset:
    """Read a delimited text file; cells in ``MISSING_TOKENS`` (case-insensitive)
    become NaN and are left for imputation. Line numbers in errors are 1-based."""
    if not os.path.isfile(spec.path):
        raise FileNotFoundError(spec.path)
    with open(spec.path, newline="") as fh:
        rows = [(i + 1, r) for i, r in enumerate(csv.reader(fh, delimiter=spec.delimiter)) if any(c.strip() for c in r)]

    header = None
    if spec.has_header and rows:
        header = [c.strip() for c in rows[0][1]]
        rows = rows[1:]
    if not rows:
        raise EmptyDataset(f"{spec.path} has no data rows")

    n_cols = len(header) if header is not None else len(rows[0][1])
    for line, r in rows:
        if len(r) != n_cols:
            raise RaggedRows(line, n_cols, len(r))
    if n_cols < 2:
        raise DatasetError("need at least one feature column and one label column")
    li = _label_index(spec.label_column, header, n_cols)
    feat_cols = [c for c in range(n_cols) if c != li]

    X = np.empty((len(rows), len(feat_cols)))
    labels = []
    for i, (line, r) in enumerate(rows):
        for j, c in enumerate(feat_cols):
            cell = r[c].strip()
            if cell.lower() in MISSING_TOKENS:
                X[i, j] = np.nan
                continue
            try:
                X[i, j] = float(cell)
            except ValueError:
                raise UnparseableCell(line, c + 1, cell) from None
        label = r[li].strip()
        if label.lower() in MISSING_TOKENS:
            raise UnparseableCell(line, li + 1, label)
        labels.append(label)

    ds = LabeledDataset.from_labels(X, labels, name=spec.id)
    names = tuple(header[c] for c in feat_cols) if header is not None else None
    return LabeledDataset(ds.X, ds.y, ds.class_names, names, spec.id)
