"""Statistical kernels for comparing indicator populations.

Rank correlation, Lin's concordance, Wilcoxon signed-rank and rank-sum
tests (exact for small samples), ECDFs and simple normalizations. Everything
here is a pure function of its inputs.
"""

from __future__ import annotations

import enum
import itertools
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

EXACT_MAX_N = 12


class UndefinedStatistic(ValueError):
    """The statistic has no value for this input (e.g. zero variance)."""


class TestMethod(str, enum.Enum):
    __test__ = False

    EXACT = "exact"
    NORMAL_APPROX = "normal_approx"


@dataclass(frozen=True)
class TestResult:
    __test__ = False

    statistic: float
    p_value: float
    method: TestMethod


def _as_array(values: Sequence[float], name: str = "values") -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-d sequence")
    return arr


def average_ranks(values: Sequence[float]) -> np.ndarray:
    """1-based ranks with ties given the mean of their positional ranks."""
    x = np.asarray(values, dtype=np.float64)
    order = np.argsort(x, kind="mergesort")
    xs = x[order]
    # boundaries of tie groups in sorted order
    edges = np.flatnonzero(np.diff(xs)) + 1
    starts = np.concatenate(([0], edges))
    ends = np.concatenate((edges, [xs.size]))
    mean_rank = (starts + ends + 1) / 2.0
    ranks = np.empty(xs.size, dtype=np.float64)
    ranks[order] = np.repeat(mean_rank, ends - starts)
    return ranks


def minmax_normalize(values: Sequence[float]) -> np.ndarray:
    x = _as_array(values)
    lo, hi = x.min(), x.max()
    if hi == lo:
        return np.zeros_like(x)
    return (x - lo) / (hi - lo)


def percent_rank(values: Sequence[float]) -> np.ndarray:
    """Tie-averaged rank rescaled to [0, 1]: ``(rank - 1) / (n - 1)``."""
    x = _as_array(values)
    if x.size == 1:
        return np.zeros(1)
    return (average_ranks(x) - 1.0) / (x.size - 1)


def _paired(x: Sequence[float], y: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    a, b = np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("paired samples must be equal-length 1-d sequences")
    if a.size < 2:
        raise ValueError("need at least two pairs")
    return a, b


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    a, b = _paired(x, y)
    da, db = a - a.mean(), b - b.mean()
    sa, sb = math.sqrt(float(da @ da)), math.sqrt(float(db @ db))
    if sa == 0.0 or sb == 0.0:
        raise UndefinedStatistic("zero variance")
    r = float(da @ db) / (sa * sb)
    return max(-1.0, min(1.0, r))


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Pearson correlation of tie-averaged ranks."""
    a, b = _paired(x, y)
    return pearson(average_ranks(a), average_ranks(b))


def lin_ccc(x: Sequence[float], y: Sequence[float]) -> float:
    """Lin's concordance correlation coefficient with population moments."""
    a, b = _paired(x, y)
    ma, mb = a.mean(), b.mean()
    va, vb = ((a - ma) ** 2).mean(), ((b - mb) ** 2).mean()
    cov = ((a - ma) * (b - mb)).mean()
    den = va + vb + (ma - mb) ** 2
    if den == 0.0:
        raise UndefinedStatistic("both samples constant and equal")
    return float(2.0 * cov / den)


def _norm_sf(z: float) -> float:
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def _two_sided(lower: float, upper: float) -> float:
    return min(1.0, 2.0 * min(lower, upper))


def _subset_sum_distribution(doubled: Sequence[int]) -> dict[int, int]:
    """Counts of every achievable sum over all subsets of ``doubled``."""
    dist = {0: 1}
    for r in doubled:
        nxt = dict(dist)
        for s, c in dist.items():
            nxt[s + r] = nxt.get(s + r, 0) + c
        dist = nxt
    return dist


def wilcoxon_signed_rank(diffs: Sequence[float]) -> TestResult:
    """Two-sided signed-rank test on paired differences.

    Zero differences are dropped. With at most ``EXACT_MAX_N`` non-zero
    differences the null distribution of W+ is enumerated over all sign
    assignments (tie-averaged ranks included); above that a normal
    approximation with continuity and tie corrections is used.
    """
    d = np.asarray(diffs, dtype=np.float64)
    d = d[d != 0.0]
    n = d.size
    if n == 0:
        return TestResult(0.0, 1.0, TestMethod.EXACT)
    ranks = average_ranks(np.abs(d))
    w_plus = float(ranks[d > 0].sum())
    if n <= EXACT_MAX_N:
        doubled = [int(round(2 * r)) for r in ranks]
        dist = _subset_sum_distribution(doubled)
        total = 2**n
        w2 = int(round(2 * w_plus))
        lower = sum(c for s, c in dist.items() if s <= w2) / total
        upper = sum(c for s, c in dist.items() if s >= w2) / total
        return TestResult(w_plus, _two_sided(lower, upper), TestMethod.EXACT)
    mean = n * (n + 1) / 4.0
    _, tie_counts = np.unique(np.abs(d), return_counts=True)
    var = n * (n + 1) * (2 * n + 1) / 24.0 - float(((tie_counts**3) - tie_counts).sum()) / 48.0
    if var <= 0.0:
        return TestResult(w_plus, 1.0, TestMethod.NORMAL_APPROX)
    z = (abs(w_plus - mean) - 0.5) / math.sqrt(var)
    p = 1.0 if z <= 0 else min(1.0, 2.0 * _norm_sf(z))
    return TestResult(w_plus, p, TestMethod.NORMAL_APPROX)


def wilcoxon_rank_sum(a: Sequence[float], b: Sequence[float]) -> TestResult:
    """Two-sided Mann-Whitney test; statistic is U for sample ``a``.

    Exact (enumerating every split of the pooled mid-ranks) when the pooled
    size is at most ``EXACT_MAX_N``, otherwise normal approximation with tie
    and continuity corrections.
    """
    x, y = _as_array(a, "a"), _as_array(b, "b")
    n1, n2 = x.size, y.size
    pooled = np.concatenate((x, y))
    ranks = average_ranks(pooled)
    u = float(ranks[:n1].sum()) - n1 * (n1 + 1) / 2.0
    n = n1 + n2
    if n <= EXACT_MAX_N:
        doubled = [int(round(2 * r)) for r in ranks]
        offset = n1 * (n1 + 1)
        u2 = int(round(2 * u))
        lower = upper = total = 0
        for combo in itertools.combinations(range(n), n1):
            s = sum(doubled[i] for i in combo) - offset
            total += 1
            lower += s <= u2
            upper += s >= u2
        return TestResult(u, _two_sided(lower / total, upper / total), TestMethod.EXACT)
    mean = n1 * n2 / 2.0
    _, tie_counts = np.unique(pooled, return_counts=True)
    tie_term = float(((tie_counts**3) - tie_counts).sum()) / (n * (n - 1))
    var = n1 * n2 / 12.0 * ((n + 1) - tie_term)
    if var <= 0.0:
        return TestResult(u, 1.0, TestMethod.NORMAL_APPROX)
    z = (abs(u - mean) - 0.5) / math.sqrt(var)
    p = 1.0 if z <= 0 else min(1.0, 2.0 * _norm_sf(z))
    return TestResult(u, p, TestMethod.NORMAL_APPROX)


def significance_stars(p: float) -> str:
    if p < 0.001:
        return "***"
    if p < 0.01:
        return "**"
    if p < 0.05:
        return "*"
    return "—"


class ECDF:
    """Right-continuous empirical CDF: ``F(t)`` is the share of values <= t."""

    def __init__(self, values: Sequence[float]) -> None:
        self.sorted = np.sort(_as_array(values))

    def __call__(self, t):
        res = np.searchsorted(self.sorted, t, side="right") / self.sorted.size
        return float(res) if np.ndim(res) == 0 else res


def ecdf(values: Sequence[float]) -> ECDF:
    return ECDF(values)


def ecdf_diff(values_b: Sequence[float], values_a: Sequence[float], grid: Sequence[float]) -> np.ndarray:
    """``F_b(t) - F_a(t)`` at each grid point; the grid must be sorted."""
    g = np.asarray(grid, dtype=np.float64)
    if g.ndim != 1 or np.any(np.diff(g) < 0):
        raise ValueError("grid must be a sorted 1-d sequence")
    return ECDF(values_b)(g) - ECDF(values_a)(g)


def quantile(values: Sequence[float], q: float) -> float:
    """Linear-interpolation quantile (the usual type-7 definition)."""
    return float(np.quantile(_as_array(values), q))


def median(values: Sequence[float]) -> float:
    return float(np.median(_as_array(values)))
