"""
Friedman rank test over a datasets x algorithms score matrix.

The p-value comes from the chi-square survival function, evaluated through the
regularized upper incomplete gamma function ``Q(dof/2, x/2)``: a power series
below ``x < a + 1`` and a modified-Lentz continued fraction above it.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .core import DegenerateInput, OblError, frozen

_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 10_000


def _lower_series(a: float, x: float) -> float:
    # P(a, x) = x^a e^-x / Gamma(a+1) * sum_n x^n / ((a+1)...(a+n))
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _upper_continued_fraction(a: float, x: float) -> float:
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def gamma_q(a: float, x: float) -> float:
    """Regularized upper incomplete gamma ``Q(a, x) = Gamma(a, x) / Gamma(a)``."""
    if a <= 0:
        raise ValueError("a must be > 0")
    if x <= 0:
        return 1.0
    if x < a + 1.0:
        return max(0.0, 1.0 - _lower_series(a, x))
    return min(1.0, _upper_continued_fraction(a, x))


def chi2_sf(x: float, dof: float) -> float:
    """Survival function ``P(X > x)`` of a chi-square variable with ``dof`` degrees of freedom."""
    if dof <= 0:
        raise ValueError("dof must be > 0")
    return gamma_q(dof / 2.0, x / 2.0)


@dataclass(frozen=True)
class ScoreMatrix:
    scores: np.ndarray  # (N datasets, k algorithms)
    higher_is_better: bool = True

    def __post_init__(self):
        s = np.asarray(self.scores, dtype=np.float64)
        if s.ndim != 2:
            raise DegenerateInput(f"score matrix must be 2-D, got shape {s.shape}")
        if s.shape[0] < 2 or s.shape[1] < 2:
            raise DegenerateInput(f"need N >= 2 datasets and k >= 2 algorithms, got {s.shape}")
        if not np.all(np.isfinite(s)):
            raise OblError("score matrix contains non-finite values")
        object.__setattr__(self, "scores", frozen(s))


@dataclass(frozen=True)
class FriedmanResult:
    mean_ranks: np.ndarray
    statistic: float
    dof: int
    p_value: float
    n_datasets: int


def rank_row(values, higher_is_better: bool = True) -> np.ndarray:
    """Ranks 1..k with rank 1 for the best value; tied values share their average rank."""
    v = np.asarray(values, dtype=np.float64).ravel()
    key = -v if higher_is_better else v
    order = np.argsort(key, kind="stable")
    ranks = np.empty(v.size)
    i = 0
    while i < v.size:
        j = i
        while j + 1 < v.size and key[order[j + 1]] == key[order[i]]:
            j += 1
        # positions i..j (0-based) share the mean of ranks i+1..j+1
        ranks[order[i:j + 1]] = (i + j + 2) / 2.0
        i = j + 1
    return ranks


def friedman(sm: ScoreMatrix) -> FriedmanResult:
    N, k = sm.scores.shape
    ranks = np.vstack([rank_row(row, sm.higher_is_better) for row in sm.scores])
    R = ranks.mean(axis=0)
    stat = 12.0 * N / (k * (k + 1)) * (np.sum(R ** 2) - k * (k + 1) ** 2 / 4.0)
    # total ties give exactly 0; clip rounding noise just below it
    stat = max(0.0, float(stat))
    return FriedmanResult(R, stat, k - 1, chi2_sf(stat, k - 1), N)


def write_friedman_csv(path, results: dict, algorithm_ids) -> None:
    """``results`` maps metric name to a FriedmanResult or to the error that prevented one."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["metric", "algorithm", "mean_rank", "statistic", "dof", "p_value"])
        for metric, res in results.items():
            if isinstance(res, FriedmanResult):
                for alg, r in zip(algorithm_ids, res.mean_ranks):
                    w.writerow([metric, alg, f"{r:.4f}", f"{res.statistic:.6f}", res.dof, f"{res.p_value:.6g}"])
            else:
                w.writerow([metric, "", "", "", "", f"{type(res).__name__}: {res}"])
