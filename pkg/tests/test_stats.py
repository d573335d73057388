from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sps

from impactum.stats import (
    ECDF,
    TestMethod,
    UndefinedStatistic,
    ecdf,
    ecdf_diff,
    lin_ccc,
    median,
    minmax_normalize,
    pearson,
    percent_rank,
    quantile,
    significance_stars,
    spearman,
    wilcoxon_rank_sum,
    wilcoxon_signed_rank,
)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
# moderate grid values; squared deviations of subnormals underflow to zero
gridded = st.integers(-8000, 8000).map(lambda k: k / 8)


# normalization and ranks -------------------------------------------------------


@pytest.mark.parametrize(
    "values, expected", [([2, 4, 10], [0, 0.25, 1]), ([7, 7, 7], [0, 0, 0]), ([0, 100], [0, 1])]
)
def test_minmax(values, expected):
    assert minmax_normalize(values).tolist() == expected


@pytest.mark.parametrize(
    "values, expected", [([10, 20, 30], [0, 0.5, 1]), ([5, 5], [0.5, 0.5]), ([30, 20, 10], [1, 0.5, 0]), ([4], [0])]
)
def test_percent_rank(values, expected):
    assert percent_rank(values).tolist() == expected


@pytest.mark.parametrize("fn", [minmax_normalize, percent_rank, ecdf])
def test_empty_input_rejected(fn):
    with pytest.raises(ValueError):
        fn([])


@given(st.lists(st.integers(-50, 50), min_size=2, max_size=40))
def test_percent_rank_matches_scipy_and_is_monotone_invariant(xs):
    ranks = percent_rank(xs)
    expected = (sps.rankdata(xs, method="average") - 1) / (len(xs) - 1)
    assert np.allclose(ranks, expected, rtol=0, atol=1e-15)
    assert np.array_equal(percent_rank([x**3 + 7 for x in xs]), ranks)


@given(st.lists(finite, min_size=2, max_size=40))
def test_minmax_preserves_order(xs):
    n = minmax_normalize(xs)
    assert n.min() >= 0 and n.max() <= 1
    for i, j in itertools.combinations(range(len(xs)), 2):
        if xs[i] < xs[j]:
            assert n[i] <= n[j]


# correlation and concordance --------------------------------------------------


def test_spearman_examples():
    x = list(range(1, 11))
    assert spearman(x, [2 * v + 1 for v in x]) == pytest.approx(1.0, abs=1e-15)
    assert spearman(x, [-v for v in x]) == pytest.approx(-1.0, abs=1e-15)
    # 1 - 6*sum(d^2)/(n(n^2-1)) with d = (-1, 1, -1, 1, 0)
    assert spearman([1, 2, 3, 4, 5], [2, 1, 4, 3, 5]) == pytest.approx(0.8, abs=1e-12)


def test_spearman_constant_is_undefined():
    with pytest.raises(UndefinedStatistic):
        spearman([1, 2, 3], [4, 4, 4])


@settings(max_examples=60)
@given(st.lists(st.tuples(st.integers(0, 9), finite), min_size=3, max_size=30))
def test_spearman_matches_scipy(pairs):
    x, y = zip(*pairs)
    if len(set(x)) < 2 or len(set(y)) < 2:
        return
    assert spearman(x, y) == pytest.approx(sps.spearmanr(x, y).statistic, abs=1e-12)


@given(st.lists(st.integers(-100, 100), min_size=3, max_size=30, unique=True))
def test_spearman_monotone_invariance(xs):
    y = [((v * 37) % 101) for v in xs]
    if len(set(y)) < 2:
        return
    assert spearman(xs, y) == pytest.approx(spearman([math.exp(v / 50) for v in xs], [v**3 for v in y]), abs=1e-12)


def test_ccc_examples():
    x = np.array([1.0, 2.0, 4.0, 7.0])
    assert lin_ccc(x, x) == pytest.approx(1.0)
    z = x - x.mean()
    assert lin_ccc(z, -z) == pytest.approx(-1.0)
    var = float(((x - x.mean()) ** 2).mean())
    assert lin_ccc(x, x + 3) == pytest.approx(2 * var / (2 * var + 9), abs=1e-12)
    assert lin_ccc(x, 10 * x) < 1.0
    with pytest.raises(UndefinedStatistic):
        lin_ccc([2, 2], [2, 2])


@given(st.lists(st.tuples(gridded, gridded), min_size=2, max_size=30))
def test_ccc_bounded_by_pearson(pairs):
    x, y = (np.array(v) for v in zip(*pairs))
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        return
    assert abs(lin_ccc(x, y)) <= abs(pearson(x, y)) + 1e-12


# Wilcoxon ---------------------------------------------------------------------


def test_signed_rank_examples():
    assert wilcoxon_signed_rank([0, 0, 0]).p_value == 1.0
    r = wilcoxon_signed_rank([1, 2, 3, 4, 5])
    assert (r.statistic, r.p_value, r.method) == (15.0, 0.0625, TestMethod.EXACT)
    assert wilcoxon_signed_rank([-1, 1]).p_value == 1.0
    assert wilcoxon_signed_rank([1, 2]).p_value == 0.5


def test_signed_rank_n13_equal_shift():
    r = wilcoxon_signed_rank([0.4] * 13)
    assert r.method is TestMethod.NORMAL_APPROX
    assert r.p_value < 0.001
    assert significance_stars(r.p_value) == "***"


def _enumerated_signed_rank_p(diffs):
    d = np.asarray(diffs, dtype=float)
    d = d[d != 0]
    ranks = sps.rankdata(np.abs(d))
    w = ranks[d > 0].sum()
    totals = [sum(r for r, s in zip(ranks, signs) if s) for signs in itertools.product((0, 1), repeat=d.size)]
    lo = sum(t <= w + 1e-9 for t in totals) / len(totals)
    hi = sum(t >= w - 1e-9 for t in totals) / len(totals)
    return min(1.0, 2 * min(lo, hi))


@settings(max_examples=150, deadline=None)
@given(st.lists(st.integers(-6, 6), min_size=1, max_size=12))
def test_signed_rank_exact_matches_enumeration(diffs):
    assert wilcoxon_signed_rank(diffs).p_value == pytest.approx(_enumerated_signed_rank_p(diffs), abs=1e-12)


def test_signed_rank_normal_matches_scipy():
    rng = np.random.default_rng(5)
    for _ in range(20):
        d = np.round(rng.normal(0.3, 1, size=30), 1)
        d = d[d != 0]
        ours = wilcoxon_signed_rank(d)
        ref = sps.wilcoxon(d, correction=True, method="approx")
        assert ours.p_value == pytest.approx(ref.pvalue, rel=1e-9)


def test_rank_sum_examples():
    r = wilcoxon_rank_sum([1, 2, 3], [10, 11, 12])
    assert (r.statistic, r.method) == (0.0, TestMethod.EXACT)
    assert r.p_value == pytest.approx(0.1, abs=1e-15)
    assert wilcoxon_rank_sum([3, 1, 2], [2, 3, 1]).p_value == pytest.approx(1.0)
    assert wilcoxon_rank_sum([5], [5]).p_value == 1.0


def test_rank_sum_exact_matches_scipy():
    rng = np.random.default_rng(9)
    for _ in range(30):
        a, b = rng.normal(size=rng.integers(1, 7)), rng.normal(0.5, size=rng.integers(1, 6))
        ref = sps.mannwhitneyu(a, b, alternative="two-sided", method="exact")
        ours = wilcoxon_rank_sum(a, b)
        assert ours.statistic == ref.statistic
        assert ours.p_value == pytest.approx(ref.pvalue, abs=1e-12)


def test_rank_sum_normal_matches_scipy():
    rng = np.random.default_rng(13)
    for _ in range(20):
        a, b = np.round(rng.normal(size=15), 1), np.round(rng.normal(0.4, size=11), 1)
        ref = sps.mannwhitneyu(a, b, alternative="two-sided", method="asymptotic", use_continuity=True)
        assert wilcoxon_rank_sum(a, b).p_value == pytest.approx(ref.pvalue, rel=1e-9)


@given(st.lists(finite, min_size=1, max_size=25))
def test_p_values_in_unit_interval(xs):
    assert 0.0 <= wilcoxon_signed_rank(xs).p_value <= 1.0
    assert 0.0 <= wilcoxon_rank_sum(xs, [x + 1 for x in xs]).p_value <= 1.0


@pytest.mark.parametrize("p, stars", [(0.0009, "***"), (0.001, "**"), (0.009, "**"), (0.04, "*"), (0.05, "—")])
def test_stars(p, stars):
    assert significance_stars(p) == stars


# ECDF -------------------------------------------------------------------------


def test_ecdf_examples():
    F = ecdf([1, 2, 2, 4])
    assert (F(2), F(0.5), F(4), F(1.999)) == (0.75, 0.0, 1.0, 0.25)
    assert ecdf_diff([1], [0], [0.5]).tolist() == [-1.0]


def test_ecdf_diff_identity_and_shift():
    a = np.random.default_rng(2).lognormal(size=200)
    grid = np.linspace(0, 20, 101)
    assert np.all(ecdf_diff(a, a, grid) == 0)
    assert np.all(ecdf_diff(a + 1, a, grid) <= 0)
    with pytest.raises(ValueError):
        ecdf_diff(a, a, [1.0, 0.0])


@given(st.lists(finite, min_size=1, max_size=40), st.lists(finite, min_size=1, max_size=10))
def test_ecdf_properties(xs, ts):
    F = ECDF(xs)
    ts = sorted(ts)
    vals = [F(t) for t in ts]
    assert all(0 <= v <= 1 for v in vals)
    assert vals == sorted(vals)
    assert F(max(xs)) == 1.0
    assert F(min(xs) - 1) == 0.0
    assert F(min(xs)) == sum(x <= min(xs) for x in xs) / len(xs)


def test_quantile_and_median():
    assert median([1, 3, 2, 4]) == 2.5
    assert quantile([1, 2, 3, 4, 5], 0.25) == 2.0
