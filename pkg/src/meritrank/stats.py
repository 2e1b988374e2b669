"""Inequality and association statistics: Gini, rank correlation, concentration ratios.

All functions are pure and safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.special import stdtr

from .errors import UndefinedStatisticError

# Exhaustive permutation p-values stay under a second up to 9!.
EXACT_PERMUTATION_MAX_N = 9

GROUP_ROUNDING_FLOOR = "floor"
GROUP_ROUNDING_NEAREST = "nearest"


@dataclass(frozen=True)
class GiniResult:
    value: float
    n: int


@dataclass(frozen=True)
class SpearmanResult:
    rho: float
    p_value: float
    n: int


@dataclass(frozen=True)
class ConcentrationRatio:
    value: float
    bottom_n: int
    top_n: int
    bottom_share: float = 0.40
    top_share: float = 0.20


def round_half_up(x: float) -> int:
    """Round to the nearest integer with halves rounding up (2.5 -> 3)."""
    return int(math.floor(x + 0.5))


def gini(values: Sequence[float]) -> GiniResult:
    """Population Gini coefficient of a non-negative vector.

    Equals sum_ij |x_i - x_j| / (2 n^2 mean), computed here in the
    equivalent O(n log n) sorted form. A constant vector scores 0; a vector
    where one observation holds everything scores (n - 1) / n. An all-zero
    vector is defined as 0 (no variation to measure).
    """
    x = np.asarray(values, dtype=float)
    n = int(x.size)
    if n < 2:
        raise UndefinedStatisticError(f"gini needs at least 2 values, got {n}")
    if np.any(x < 0):
        raise ValueError("gini is defined for non-negative values only")
    total = float(x.sum())
    if total == 0.0:
        return GiniResult(0.0, n)
    xs = np.sort(x)
    i = np.arange(1, n + 1)
    value = float(((2 * i - n - 1) * xs).sum() / (n * total))
    return GiniResult(value, n)


def _average_ranks(x: np.ndarray) -> np.ndarray:
    """Ranks 1..n; tied values share the mean of the ranks they span."""
    order = np.argsort(x, kind="mergesort")
    sx = x[order]
    ranks = np.empty(x.size, dtype=float)
    i = 0
    while i < x.size:
        j = i
        while j + 1 < x.size and sx[j + 1] == sx[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def _rank_correlation(rx: np.ndarray, ry: np.ndarray) -> float:
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    denom = math.sqrt(float((dx * dx).sum() * (dy * dy).sum()))
    rho = float((dx * dy).sum() / denom)
    return max(-1.0, min(1.0, rho))


@lru_cache(maxsize=None)
def _permutation_matrix(n: int) -> np.ndarray:
    """All n! permutations of 0..n-1, one per row; cached, treat as read-only."""
    if n == 1:
        return np.zeros((1, 1), dtype=np.intp)
    smaller = _permutation_matrix(n - 1)
    m = smaller.shape[0]
    out = np.empty((m * n, n), dtype=np.intp)
    for i in range(n):
        block = out[i * m : (i + 1) * m]
        block[:, :i] = smaller[:, :i]
        block[:, i] = n - 1
        block[:, i + 1 :] = smaller[:, i:]
    return out


def _exact_permutation_p(rx: np.ndarray, ry: np.ndarray, rho_obs: float) -> float:
    """Two-sided p over all n! equally likely pairings of the rank vectors."""
    n = int(rx.size)
    perms = _permutation_matrix(n)
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    denom = math.sqrt(float((dx * dx).sum() * (dy * dy).sum()))
    # sum(dx) == 0, so permuted-ry dot dx already equals the centered product.
    rhos = (ry[perms] @ dx) / denom
    hits = int(np.count_nonzero(np.abs(rhos) >= abs(rho_obs) - 1e-12))
    return hits / perms.shape[0]


def _t_approximation_p(rho: float, n: int) -> float:
    if abs(rho) >= 1.0:
        return 0.0
    t = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
    return float(2.0 * stdtr(n - 2, -abs(t)))


def spearman(x: Sequence[float], y: Sequence[float]) -> SpearmanResult:
    """Tie-aware Spearman rank correlation with a two-sided p-value.

    rho is the Pearson correlation of the average-rank transforms. The
    p-value is exact (all n! pairings enumerated) for n <= 9 and uses the
    t approximation t = rho * sqrt((n - 2) / (1 - rho^2)) above that.
    """
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if xa.size != ya.size:
        raise ValueError(f"length mismatch: {xa.size} vs {ya.size}")
    n = int(xa.size)
    if n < 3:
        raise UndefinedStatisticError(f"spearman needs at least 3 pairs, got {n}")
    rx = _average_ranks(xa)
    ry = _average_ranks(ya)
    if np.all(xa == xa[0]) or np.all(ya == ya[0]):
        raise UndefinedStatisticError("spearman is undefined for a zero-variance vector")
    rho = _rank_correlation(rx, ry)
    if n <= EXACT_PERMUTATION_MAX_N:
        p = _exact_permutation_p(rx, ry, rho)
    else:
        p = _t_approximation_p(rho, n)
    return SpearmanResult(rho, p, n)


def _group_size(share: float, n: int, rounding: str) -> int:
    if rounding == GROUP_ROUNDING_FLOOR:
        return int(math.floor(share * n + 1e-9))
    if rounding == GROUP_ROUNDING_NEAREST:
        return round_half_up(share * n)
    raise ValueError(f"unknown group rounding {rounding!r}")


def bottom_top_ratio(
    values: Sequence[float],
    rounding: str = GROUP_ROUNDING_FLOOR,
    bottom_share: float = 0.40,
    top_share: float = 0.20,
) -> ConcentrationRatio:
    """Cumulative value of the bottom 40% over the cumulative top 20%.

    Near zero means the bottom group contributes almost nothing relative to
    the top performers; degenerate near-equal data can push it above 1.
    """
    x = np.asarray(values, dtype=float)
    n = int(x.size)
    if n < 5:
        raise UndefinedStatisticError(f"bottom/top ratio needs at least 5 values, got {n}")
    n_bottom = _group_size(bottom_share, n, rounding)
    n_top = _group_size(top_share, n, rounding)
    xs = np.sort(x)
    bottom = float(xs[:n_bottom].sum())
    top = float(xs[n - n_top :].sum())
    if top == 0.0:
        raise UndefinedStatisticError("top group has zero cumulative value")
    return ConcentrationRatio(bottom / top, n_bottom, n_top, bottom_share, top_share)


def quantile_class_sizes(n: int, k: int) -> list[int]:
    """Class sizes differing by at most one, remainder going to the extremes first.

    The r = n mod k extra units are assigned one at a time alternating from
    the outside inward: first class, last class, second class, second-to-last...
    """
    if k < 1:
        raise ValueError("need at least one class")
    if n < k:
        raise UndefinedStatisticError(f"cannot split {n} units into {k} classes")
    base, extra = divmod(n, k)
    sizes = [base] * k
    order = []
    lo, hi = 0, k - 1
    while lo <= hi:
        order.append(lo)
        if hi != lo:
            order.append(hi)
        lo += 1
        hi -= 1
    for pos in order[:extra]:
        sizes[pos] += 1
    return sizes


def classify_quantiles(ranked: Sequence, k: int) -> list[int]:
    """Assign a 0-based class (0 = best) to each unit of an already-ranked list."""
    sizes = quantile_class_sizes(len(ranked), k)
    classes: list[int] = []
    for class_index, size in enumerate(sizes):
        classes.extend([class_index] * size)
    return classes
