from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from impactum.compare import (
    ComparisonError,
    IndicatorTable,
    MatchKey,
    concordance_matrix,
    descriptive_table,
    ecdf_shift,
    mapped_subject_groups,
    match_journals,
    publisher_distribution,
    quadrant_assess_normalized,
    quadrant_assess_raw,
    quartile_sizes,
    quartile_subject_proportions,
    rank_difference_analysis,
    subject_crosswalk,
    subject_trend,
)
from impactum.corpus import Scheme, SubjectAssignment, issn_check_digit


def issn(k: int) -> str:
    body = f"{k:07d}"
    return body + issn_check_digit(body)


def rec(jid, year, *, issn_=None, title=None, publisher=None, **values):
    r = {"journal_id": jid, "year": year, "issn": issn_ or "", "title": title or "", "publisher": publisher or ""}
    r.update(values)
    return r


def table(source, records):
    return IndicatorTable.from_records(source, records)


def single(records):
    return match_journals([table("t", records)])


# matching -------------------------------------------------------------------


def test_match_by_issn():
    m = match_journals([table("a", [rec("A1", 2024, issn_=issn(1))]), table("b", [rec("B9", 2024, issn_=issn(1))])])
    (e,) = m.entries
    assert e.match_key_used is MatchKey.ISSN
    assert set(e.members) == {"a", "b"}


def test_match_by_title_when_issn_differs():
    a = table("a", [rec("A1", 2024, issn_=issn(1), title="Journal of Things")])
    b = table("b", [rec("B1", 2024, issn_=issn(2), title="JOURNAL OF THINGS!")])
    (e,) = match_journals([a, b]).entries
    assert e.match_key_used is MatchKey.TITLE


def test_match_by_eissn_overlap():
    a = IndicatorTable.from_records("a", [{"journal_id": "A1", "year": 2024, "issn": issn(1), "eissn": issn(5)}])
    b = IndicatorTable.from_records("b", [{"journal_id": "B1", "year": 2024, "issn": issn(5)}])
    (e,) = match_journals([a, b]).entries
    assert e.match_key_used is MatchKey.EISSN


def test_ambiguous_title_dropped():
    a = table("a", [rec("A1", 2024, title="Data")])
    b = table("b", [rec("B1", 2024, title="Data"), rec("B2", 2024, title="data.")])
    m = match_journals([a, b])
    assert len(m) == 0
    assert m.ambiguous == 1
    assert m.unmatched == {"a": 1, "b": 2}


def _random_tables(seed):
    import random

    rnd = random.Random(seed)
    tables = []
    for src in "abc":
        recs = []
        for k in rnd.sample(range(12), 8):
            recs.append(rec(f"{src}{k}", 2024, issn_=issn(k) if rnd.random() < 0.6 else None,
                            title=f"Journal {k % 9}", i3=float(k)))
        tables.append(table(src, recs))
    return tables


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.permutations([0, 1, 2]))
def test_matching_symmetric_and_idempotent(seed, perm):
    tables = _random_tables(seed)
    m1 = match_journals(tables)
    m2 = match_journals([tables[i] for i in perm])
    sig = lambda m: [(e.key, e.match_key_used, {s: r.journal_id for s, r in e.members.items()}) for e in m.entries]  # noqa: E731
    assert sig(m1) == sig(m2)
    assert sig(match_journals(tables)) == sig(m1)
    keys = [e.key for e in m1.entries]
    assert len(keys) == len(set(keys))


def test_match_needs_tables():
    with pytest.raises(ComparisonError):
        match_journals([])


# concordance ----------------------------------------------------------------


def _concordance_set(xs, ys, zs):
    return single([rec(f"J{i}", 2024, i3_n=x, jif=y, citescore=z) for i, (x, y, z) in enumerate(zip(xs, ys, zs))])


def test_concordance_identical_and_scaled():
    xs = [1.0, 2.0, 3.5, 4.0, 9.0]
    cells = {(c.x, c.y): c for c in concordance_matrix(_concordance_set(xs, xs, [10 * x for x in xs]), 2024)}
    same = cells[("i3_n", "jif")]
    assert (same.spearman, same.ccc, same.n) == (pytest.approx(1.0), pytest.approx(1.0), 5)
    scaled = cells[("i3_n", "citescore")]
    assert scaled.spearman == pytest.approx(1.0)
    assert scaled.ccc < 1.0


def test_concordance_constant_column_undefined():
    cells = concordance_matrix(_concordance_set([1, 2, 3], [5, 5, 5], [1, 2, 4]), 2024)
    cell = next(c for c in cells if (c.x, c.y) == ("i3_n", "jif"))
    assert cell.spearman is None and "spearman undefined" in cell.note


def test_concordance_needs_two_pairs():
    cells = concordance_matrix(_concordance_set([1], [2], [3]), 2024)
    assert all(c.spearman is None and c.n == 1 for c in cells)


# quadrants ------------------------------------------------------------------


def test_raw_quadrants():
    recs = [rec("TOP", 2024, i3=100, i3_n=50.0), rec("BIG", 2024, i3=90, i3_n=1.0), rec("LOW", 2024, i3=1, i3_n=0.5),
            rec("MID", 2024, i3=10, i3_n=5.0), rec("NICHE", 2024, i3=2, i3_n=40.0)]
    labels = {q.key: q.quadrant for q in quadrant_assess_raw(single(recs), 2024)}
    assert labels["TOP"] == "Q1"
    assert labels["BIG"] == "Q2"
    assert labels["LOW"] == "Q3"
    assert labels["NICHE"] == "Q4"
    assert labels["MID"] == "Q1"  # exactly at both medians


@given(st.lists(st.tuples(st.integers(0, 50), st.integers(0, 50)), min_size=1, max_size=20))
def test_raw_quadrants_invariant_under_monotone_rescaling(points):
    base = single([rec(f"J{i:02d}", 2024, i3=x, i3_n=float(y)) for i, (x, y) in enumerate(points)])
    scaled = single([rec(f"J{i:02d}", 2024, i3=x**3 + 5, i3_n=math.exp(y / 10)) for i, (x, y) in enumerate(points)])
    assert [q.quadrant for q in quadrant_assess_raw(base, 2024)] == [q.quadrant for q in quadrant_assess_raw(scaled, 2024)]


def test_normalized_quadrants():
    # the target journal sits where norm(i3)=0.9, norm(n)=0.1, norm(i3_n)=0.2, norm(cs)=0.8
    recs = [
        rec("LO", 2024, i3=0, n_pubs=0, i3_n=0.0, citescore=0.0),
        rec("HI", 2024, i3=10, n_pubs=10, i3_n=10.0, citescore=10.0),
        rec("CA", 2024, i3=9, n_pubs=1, i3_n=2.0, citescore=8.0),
        rec("SU", 2024, i3=1, n_pubs=9, i3_n=8.0, citescore=2.0),
    ]
    labels = {q.key: q for q in quadrant_assess_normalized(single(recs), 2024)}
    assert labels["CA"].quadrant == "Q2"
    assert labels["CA"].axis_x == pytest.approx(0.8) and labels["CA"].axis_y == pytest.approx(-0.6)
    assert labels["SU"].quadrant == "Q4"
    assert (labels["HI"].axis_x, labels["HI"].axis_y, labels["HI"].quadrant) == (0.0, 0.0, "Q1")


# rank differences -----------------------------------------------------------


def test_quartile_sizes():
    assert quartile_sizes(8) == [2, 2, 2, 2]
    assert quartile_sizes(10) == [3, 3, 2, 2]
    assert quartile_sizes(5) == [2, 1, 1, 1]


def test_rank_difference_eight_journals():
    recs = [rec(f"J{i}", 2024, i3_n=float(i), citescore=float((i * 3) % 8), n_pubs=10 + i, citations=i) for i in range(8)]
    res = rank_difference_analysis(single(recs), 2024)
    assert [s.n for s in res.summary] == [2, 2, 2, 2]
    means = [s.mean_rank_difference for s in res.summary]
    assert means == sorted(means)
    assert sum(r.rank_difference for r in res.rows) == pytest.approx(0.0, abs=1e-12)


@given(st.lists(st.tuples(st.integers(0, 20), st.integers(0, 20)), min_size=4, max_size=40))
def test_rank_difference_structure(pairs):
    recs = [rec(f"J{i:02d}", 2024, i3_n=float(a), citescore=float(b)) for i, (a, b) in enumerate(pairs)]
    res = rank_difference_analysis(single(recs), 2024)
    sizes = [s.n for s in res.summary]
    assert max(sizes) - min(sizes) <= 1 and sum(sizes) == len(pairs)
    means = [s.mean_rank_difference for s in res.summary]
    assert all(a <= b + 1e-12 for a, b in zip(means, means[1:]))


def test_rank_difference_needs_four():
    with pytest.raises(ComparisonError):
        rank_difference_analysis(single([rec(f"J{i}", 2024, i3_n=1.0, citescore=1.0) for i in range(3)]), 2024)


def test_rank_difference_population_parameter():
    recs = [rec(f"J{i}", 2024, i3_n=float(i), citescore=float(i)) for i in range(10)]
    m = single(recs)
    res = rank_difference_analysis(m, 2024, population=[e.key for e in m.entries[:6]])
    assert len(res.rows) == 6


# subjects -------------------------------------------------------------------


def assign(scheme, sid, jid):
    return SubjectAssignment(Scheme(scheme), sid, sid, jid, jid)


def test_crosswalk_basics():
    m = single([rec("J1", 2024, i3_n=1.0), rec("J2", 2024, i3_n=1.0)])
    a = [assign("scilit", "S1", "J1"), assign("scopus_asjc", "2002", "J2")]
    assert subject_crosswalk(a, m, threshold=0) == []
    shared = a + [assign("scopus_asjc", "2002", "J1")]
    (edge,) = subject_crosswalk(shared, m, threshold=0)
    assert edge.overlap == 1
    assert {edge.subject_a[0], edge.subject_b[0]} == {Scheme.SCILIT, Scheme.SCOPUS_ASJC}


def test_crosswalk_triangle_and_threshold_monotone():
    recs = [rec(f"J{i}", 2024, i3_n=1.0) for i in range(5)]
    m = single(recs)
    a = [assign(s, sid, f"J{i}") for i in range(5) for s, sid in (("scilit", "S76"), ("scopus_asjc", "2002"),
                                                                  ("wos_category", "W648"))]
    edges = subject_crosswalk(a, m, threshold=3)
    assert len(edges) == 3 and all(e.overlap == 5 for e in edges)
    (tri,) = mapped_subject_groups(edges)
    assert {s[0] for s in tri} == set(Scheme)
    for t in range(0, 7):
        hi = {(e.subject_a, e.subject_b) for e in subject_crosswalk(a, m, t + 1)}
        lo = {(e.subject_a, e.subject_b) for e in subject_crosswalk(a, m, t)}
        assert hi <= lo


def _trend_set(deltas):
    recs = []
    for i, d in enumerate(deltas):
        recs += [rec(f"J{i:02d}", 2023, i3_n=10.0 + i), rec(f"J{i:02d}", 2024, i3_n=10.0 + i + d)]
    m = single(recs)
    a = [assign("scilit", "S1", f"J{i:02d}") for i in range(len(deltas))]
    return m, a


def test_trend_uniform_increase():
    m, a = _trend_set([0.5] * 13)
    t = subject_trend([(Scheme.SCILIT, "S1")], m, "i3_n", 2023, 2024, a)
    assert (t.direction, t.stars, t.n) == ("up", "***", 13)


def test_trend_symmetric_is_flat():
    m, a = _trend_set([-2.0, -1.0, 1.0, 2.0, 0.0])
    t = subject_trend([(Scheme.SCILIT, "S1")], m, "i3_n", 2023, 2024, a)
    assert (t.direction, t.stars) == ("flat", "—")


def test_trend_tiny_group_and_empty():
    m, a = _trend_set([1.0, 2.0])
    t = subject_trend([(Scheme.SCILIT, "S1")], m, "i3_n", 2023, 2024, a)
    assert (t.stars, t.test.p_value) == ("—", 0.5)
    none = subject_trend([(Scheme.WOS_CATEGORY, "W1")], m, "i3_n", 2023, 2024, a)
    assert none.n == 0 and none.reason


def _publisher_set(factor, n=20, publisher="Expanding"):
    recs = []
    for i in range(n):
        base = 3.0 + i
        recs += [rec(f"{publisher}{i}", 2023, i3_n=base, publisher=publisher),
                 rec(f"{publisher}{i}", 2024, i3_n=base * factor, publisher=publisher)]
    return recs


def test_publisher_identical_is_stable():
    (s,) = publisher_distribution(single(_publisher_set(1.0)), 2023, 2024)
    assert (s.delta_pct, s.verdict) == (0.0, "Stable")


def test_publisher_scaled_down():
    (s,) = publisher_distribution(single(_publisher_set(0.885)), 2023, 2024)
    assert s.delta_pct == pytest.approx(-11.5, abs=1e-9)
    assert s.verdict == "Decrease"


def test_publisher_below_min_omitted():
    m = single(_publisher_set(1.0, n=1, publisher="Solo") + _publisher_set(1.1, n=6, publisher="Six"))
    assert [s.publisher for s in publisher_distribution(m, 2023, 2024, min_journals=5)] == ["Six"]


def test_quartile_subject_proportions():
    recs = [rec(f"J{i:02d}", 2024, i3_n=float(i), citescore=float(20 - i)) for i in range(20)]
    m = single(recs)
    res = rank_difference_analysis(m, 2024)
    q4 = [r.key for r in res.rows if r.quartile == 4]
    big = [assign("scilit", "ALLQ4", k) for k in q4]
    mixed = [assign("scilit", "MIX", e.key) for e in m.entries[::2]]
    tiny = [assign("scilit", "TINY", m.entries[0].key)]
    out = quartile_subject_proportions(res, big + mixed + tiny, m, "scilit", output_rank_cutoff=0.5)
    assert out.top_q4[0].subject_id == "ALLQ4"
    assert out.top_q4[0].proportions[3] == 1.0
    assert "TINY" not in {s.subject_id for s in out.subjects}
    with pytest.raises(ComparisonError):
        quartile_subject_proportions(res, big, m, "wos_category")


# distributions --------------------------------------------------------------


def test_ecdf_shift_identity_and_shift():
    same = single([r for i in range(10) for r in (rec(f"J{i}", 2023, i3_n=float(i)), rec(f"J{i}", 2024, i3_n=float(i)))])
    assert all(p.diff == 0 for p in ecdf_shift(same, 2023, 2024, ["i3_n"]))
    up = single([r for i in range(10) for r in (rec(f"J{i}", 2023, i3_n=float(i)), rec(f"J{i}", 2024, i3_n=i + 1.0))])
    pts = ecdf_shift(up, 2023, 2024, ["i3_n"])
    assert pts and all(p.diff <= 0 for p in pts)


def test_descriptive_table_skips_undefined():
    m = single([rec("A", 2024, jif=1.0), rec("B", 2024, jif=3.0), rec("C", 2024, jif="")])
    ((ind, year, d),) = descriptive_table(m, [2024], ["jif"])
    assert (ind, year, d.n, d.mean) == ("jif", 2024, 2, 2.0)
