"""Cross-indicator and year-over-year comparison of journal indicator tables.

Tables from one or more sources are aligned into a :class:`MatchedJournalSet`
(ISSN first, then any ISSN/eISSN overlap, then normalized title). Each
analysis below is a pure function of that matched set.
"""

from __future__ import annotations

import csv
import enum
import itertools
import math
import statistics
from collections import defaultdict
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import CorpusView, Scheme, SubjectAssignment, normalize_issn, normalize_title
from .indicators import DescriptiveStats, IndicatorRow, describe
from .stats import (
    TestResult,
    UndefinedStatistic,
    ecdf_diff,
    lin_ccc,
    minmax_normalize,
    percent_rank,
    significance_stars,
    spearman,
    wilcoxon_rank_sum,
    wilcoxon_signed_rank,
)

INDICATORS = ("n_pubs", "i3", "i3_n", "jif", "citescore", "citations")
CONCORDANCE_PAIRS = (("i3_n", "citescore"), ("i3_n", "jif"), ("jif", "citescore"))
DEFAULT_CROSSWALK_THRESHOLD = 200


class ComparisonError(ValueError):
    pass


class MatchKey(str, enum.Enum):
    ISSN = "issn"
    EISSN = "eissn"
    TITLE = "title"


_STAGE_ORDER = (MatchKey.ISSN, MatchKey.EISSN, MatchKey.TITLE)


@dataclass
class SourceRow:
    source: str
    journal_id: str | None
    title: str = ""
    issn: tuple[str, ...] = ()
    eissn: tuple[str, ...] = ()
    publisher: str | None = None
    values: dict[tuple[str, int], float | None] = field(default_factory=dict)

    def stage_keys(self, stage: MatchKey) -> list[str]:
        if stage is MatchKey.ISSN:
            return list(self.issn)
        if stage is MatchKey.EISSN:
            return sorted(set(self.issn) | set(self.eissn))
        t = normalize_title(self.title) if self.title else ""
        return [t] if t else []


@dataclass
class IndicatorTable:
    source: str
    rows: list[SourceRow]

    @classmethod
    def from_indicator_rows(
        cls, source: str, rows: Iterable[IndicatorRow], view: CorpusView | None = None
    ) -> IndicatorTable:
        return cls.from_records(source, (r.to_record() for r in rows), view)

    @classmethod
    def from_records(
        cls, source: str, records: Iterable[Mapping[str, object]], view: CorpusView | None = None
    ) -> IndicatorTable:
        """Build a table from ``indicators.csv``-style records.

        Identification columns ``issn``, ``eissn``, ``title`` and
        ``publisher`` are used when present (``;``-separated lists for ISSNs);
        otherwise they are looked up in ``view`` by ``journal_id``.
        """
        merged: dict[str, SourceRow] = {}
        for rec in records:
            jid = _blank_to_none(rec.get("journal_id"))
            title = str(rec.get("title") or "")
            issn = _issn_list(rec.get("issn"))
            eissn = _issn_list(rec.get("eissn"))
            publisher = _blank_to_none(rec.get("publisher"))
            if view is not None and jid is not None and jid in view.journals:
                j = view.journals[jid]
                title = title or j.title
                issn = issn or j.issn
                eissn = eissn or j.eissn
                publisher = publisher or j.publisher_name or j.publisher_id
            key = jid or (issn[0] if issn else eissn[0] if eissn else normalize_title(title))
            if not key:
                continue
            row = merged.get(key)
            if row is None:
                row = merged[key] = SourceRow(source, jid, title, tuple(issn), tuple(eissn), publisher)
            year = int(str(rec["year"]))
            for name in INDICATORS:
                if name in rec:
                    row.values[(name, year)] = _to_float(rec[name])
        return cls(source, [merged[k] for k in sorted(merged)])

    @classmethod
    def from_csv(cls, path: Path, view: CorpusView | None = None, source: str | None = None) -> IndicatorTable:
        with path.open(encoding="utf-8", newline="") as fh:
            return cls.from_records(source or path.stem, list(csv.DictReader(fh)), view)


def _blank_to_none(v: object) -> str | None:
    if v is None:
        return None
    s = str(v).strip()
    return s or None


def _to_float(v: object) -> float | None:
    if v is None:
        return None
    if isinstance(v, (int, float)):
        return None if isinstance(v, float) and math.isnan(v) else float(v)
    s = str(v).strip()
    return float(s) if s else None


def _issn_list(v: object) -> tuple[str, ...]:
    if v is None:
        return ()
    items = v if isinstance(v, (list, tuple)) else str(v).split(";")
    out = []
    for item in items:
        n = normalize_issn(str(item))
        if n and n not in out:
            out.append(n)
    return tuple(out)


@dataclass
class MatchedJournal:
    key: str
    match_key_used: MatchKey
    members: dict[str, SourceRow]
    values: dict[tuple[str, int], float | None]
    publisher: str | None
    identifiers: frozenset[str]

    def value(self, indicator: str, year: int) -> float | None:
        return self.values.get((indicator, year))


@dataclass
class MatchedJournalSet:
    entries: list[MatchedJournal]
    sources: tuple[str, ...]
    unmatched: dict[str, int]
    ambiguous: int
    conflicts: int

    def __len__(self) -> int:
        return len(self.entries)

    def years(self) -> list[int]:
        return sorted({y for e in self.entries for (_, y), v in e.values.items() if v is not None})

    def column(self, indicator: str, year: int) -> list[tuple[MatchedJournal, float]]:
        out = []
        for e in self.entries:
            v = e.value(indicator, year)
            if v is not None:
                out.append((e, v))
        return out

    def lookup(self) -> dict[str, MatchedJournal]:
        """Identifier (journal id, ISSN or eISSN) to entry."""
        out: dict[str, MatchedJournal] = {}
        for e in self.entries:
            for ident in e.identifiers:
                out.setdefault(ident, e)
        return out


class _Groups:
    def __init__(self, nodes: list[tuple[str, int]]) -> None:
        self.parent = {n: n for n in nodes}
        self.sources = {n: {n[0]} for n in nodes}
        self.stage: dict[tuple[str, int], MatchKey | None] = {n: None for n in nodes}

    def find(self, n):
        while self.parent[n] != n:
            self.parent[n] = self.parent[self.parent[n]]
            n = self.parent[n]
        return n

    def merge(self, roots: list, stage: MatchKey) -> None:
        root = min(roots)
        for r in roots:
            if r != root:
                self.parent[r] = root
                self.sources[root] |= self.sources.pop(r)
                self.stage.pop(r, None)
        self.stage[root] = stage


def match_journals(tables: Sequence[IndicatorTable]) -> MatchedJournalSet:
    """Align rows of several tables one-to-one.

    Keys are tried in precedence ISSN, then any ISSN/eISSN overlap, then
    normalized title. A key carried by two rows of the same table is
    ambiguous and never used for linking. The result does not depend on the
    order of ``tables``.
    """
    if not tables:
        raise ComparisonError("no tables to match")
    names = [t.source for t in tables]
    if len(set(names)) != len(names):
        raise ComparisonError(f"duplicate table sources: {names}")
    rows = {(t.source, i): r for t in tables for i, r in enumerate(t.rows)}
    groups = _Groups(sorted(rows))
    ambiguous = conflicts = 0
    for stage in _STAGE_ORDER:
        by_key: dict[str, list[tuple[str, int]]] = defaultdict(list)
        for node, row in rows.items():
            for k in row.stage_keys(stage):
                by_key[k].append(node)
        for k in sorted(by_key):
            nodes = by_key[k]
            srcs = [n[0] for n in nodes]
            if len(set(srcs)) != len(srcs):
                ambiguous += 1
                continue
            roots = sorted({groups.find(n) for n in nodes})
            if len(roots) < 2:
                continue
            combined = [s for r in roots for s in groups.sources[r]]
            if len(set(combined)) != len(combined):
                conflicts += 1
                continue
            groups.merge(roots, stage)

    members_by_root: dict = defaultdict(list)
    for node in rows:
        members_by_root[groups.find(node)].append(node)
    all_sources = set(names)
    entries: list[MatchedJournal] = []
    unmatched = {s: 0 for s in sorted(names)}
    for root, nodes in members_by_root.items():
        if {n[0] for n in nodes} != all_sources:
            for n in nodes:
                unmatched[n[0]] += 1
            continue
        members = {n[0]: rows[n] for n in sorted(nodes)}
        entries.append(_make_entry(members, groups.stage.get(root)))
    entries.sort(key=lambda e: e.key)
    _dedupe_keys(entries)
    return MatchedJournalSet(entries, tuple(sorted(names)), unmatched, ambiguous, conflicts)


def _make_entry(members: dict[str, SourceRow], stage: MatchKey | None) -> MatchedJournal:
    ordered = [members[s] for s in sorted(members)]
    issns = sorted({k for r in ordered for k in r.issn})
    eissns = sorted({k for r in ordered for k in r.eissn})
    ids = sorted({r.journal_id for r in ordered if r.journal_id})
    if stage is None:
        stage = MatchKey.ISSN if issns else MatchKey.EISSN if eissns else MatchKey.TITLE
    if issns:
        key = issns[0]
    elif eissns:
        key = eissns[0]
    elif ids:
        key = ids[0]
    else:
        key = normalize_title(ordered[0].title)
    values: dict[tuple[str, int], float | None] = {}
    for r in ordered:
        for k, v in r.values.items():
            if values.get(k) is None:
                values[k] = v
    publisher = next((r.publisher for r in ordered if r.publisher), None)
    return MatchedJournal(key, stage, members, values, publisher, frozenset(issns + eissns + ids))


def _dedupe_keys(entries: list[MatchedJournal]) -> None:
    seen: dict[str, int] = {}
    for e in entries:
        if e.key in seen:
            seen[e.key] += 1
            e.key = f"{e.key}#{seen[e.key]}"
        else:
            seen[e.key] = 0


# -- concordance ---------------------------------------------------------------


@dataclass(frozen=True)
class ConcordanceCell:
    year: int
    x: str
    y: str
    n: int
    spearman: float | None
    ccc: float | None
    note: str = ""


def concordance_matrix(matched: MatchedJournalSet, year: int, *, normalized: bool = False) -> list[ConcordanceCell]:
    cells = []
    for xi, yi in CONCORDANCE_PAIRS:
        pairs = [(e.value(xi, year), e.value(yi, year)) for e in matched.entries]
        pairs = [(a, b) for a, b in pairs if a is not None and b is not None]
        n = len(pairs)
        if n < 2:
            cells.append(ConcordanceCell(year, xi, yi, n, None, None, "fewer than 2 pairs"))
            continue
        xs = np.array([p[0] for p in pairs])
        ys = np.array([p[1] for p in pairs])
        if normalized:
            xs, ys = minmax_normalize(xs), minmax_normalize(ys)
        notes = []
        try:
            rho: float | None = spearman(xs, ys)
        except UndefinedStatistic:
            rho = None
            notes.append("spearman undefined: constant column")
        try:
            ccc: float | None = lin_ccc(xs, ys)
        except UndefinedStatistic:
            ccc = None
            notes.append("ccc undefined")
        cells.append(ConcordanceCell(year, xi, yi, n, rho, ccc, "; ".join(notes)))
    return cells


# -- quadrants -----------------------------------------------------------------


@dataclass(frozen=True)
class QuadrantLabel:
    key: str
    quadrant: str
    axis_x: float
    axis_y: float


def _quadrant(x_high: bool, y_high: bool) -> str:
    if x_high:
        return "Q1" if y_high else "Q2"
    return "Q4" if y_high else "Q3"


def quadrant_assess_raw(matched: MatchedJournalSet, year: int) -> list[QuadrantLabel]:
    """I3 (x) against I3/N (y), split at the population medians; ties go above."""
    pts = [(e.key, e.value("i3", year), e.value("i3_n", year)) for e in matched.entries]
    pts = [(k, x, y) for k, x, y in pts if x is not None and y is not None]
    if not pts:
        return []
    mx = statistics.median(p[1] for p in pts)
    my = statistics.median(p[2] for p in pts)
    return [QuadrantLabel(k, _quadrant(x >= mx, y >= my), x, y) for k, x, y in pts]


def quadrant_assess_normalized(matched: MatchedJournalSet, year: int) -> list[QuadrantLabel]:
    """Scale effect norm(I3) - norm(N) against unit quality norm(I3/N) - norm(CiteScore)."""
    names = ("i3", "n_pubs", "i3_n", "citescore")
    rows = []
    for e in matched.entries:
        vals = [e.value(n, year) for n in names]
        if all(v is not None for v in vals):
            rows.append((e.key, vals))
    if not rows:
        return []
    cols = [minmax_normalize([r[1][i] for r in rows]) for i in range(4)]
    out = []
    for j, (key, _) in enumerate(rows):
        scale = float(cols[0][j] - cols[1][j])
        quality = float(cols[2][j] - cols[3][j])
        out.append(QuadrantLabel(key, _quadrant(scale >= 0, quality >= 0), scale, quality))
    return out


# -- rank differences -------------------------------------------------------


@dataclass(frozen=True)
class RankDifference:
    key: str
    rank_i3n: float
    rank_citescore: float
    rank_difference: float
    quartile: int


@dataclass(frozen=True)
class QuartileSummary:
    quartile: int
    n: int
    mean_outputs: float | None
    mean_citations: float | None
    mean_i3n: float
    mean_citescore: float
    mean_rank_i3n: float
    mean_rank_citescore: float
    mean_rank_difference: float


@dataclass
class RankDifferenceResult:
    year: int
    rows: list[RankDifference]
    summary: list[QuartileSummary]

    def quartile_of(self) -> dict[str, int]:
        return {r.key: r.quartile for r in self.rows}


def quartile_sizes(n: int) -> list[int]:
    base, rem = divmod(n, 4)
    return [base + (1 if q < rem else 0) for q in range(4)]


def _mean(values: list[float]) -> float | None:
    return math.fsum(values) / len(values) if values else None


def rank_difference_analysis(
    matched: MatchedJournalSet, year: int, population: Iterable[str] | None = None
) -> RankDifferenceResult:
    """Percent-rank difference (I3/N minus CiteScore) and its quartile split.

    ``population`` restricts the analysis to the given entry keys; by default
    every entry with both indicators defined is used.
    """
    allowed = set(population) if population is not None else None
    ents = [
        e
        for e in matched.entries
        if e.value("i3_n", year) is not None
        and e.value("citescore", year) is not None
        and (allowed is None or e.key in allowed)
    ]
    if len(ents) < 4:
        raise ComparisonError(f"rank-difference quartiles need at least 4 journals, got {len(ents)}")
    r_i3n = percent_rank([e.value("i3_n", year) for e in ents])
    r_cs = percent_rank([e.value("citescore", year) for e in ents])
    diff = r_i3n - r_cs
    order = sorted(range(len(ents)), key=lambda i: (diff[i], ents[i].key))
    rows: list[RankDifference] = []
    pos = 0
    for q, size in enumerate(quartile_sizes(len(ents)), start=1):
        for i in order[pos : pos + size]:
            rows.append(RankDifference(ents[i].key, float(r_i3n[i]), float(r_cs[i]), float(diff[i]), q))
        pos += size
    by_key = {e.key: e for e in ents}
    summary = []
    for q in range(1, 5):
        qrows = [r for r in rows if r.quartile == q]
        es = [by_key[r.key] for r in qrows]
        outs = [e.value("n_pubs", year) for e in es]
        cits = [e.value("citations", year) for e in es]
        summary.append(
            QuartileSummary(
                quartile=q,
                n=len(qrows),
                mean_outputs=_mean([v for v in outs if v is not None]),
                mean_citations=_mean([v for v in cits if v is not None]),
                mean_i3n=_mean([e.value("i3_n", year) for e in es]),  # type: ignore[arg-type]
                mean_citescore=_mean([e.value("citescore", year) for e in es]),  # type: ignore[arg-type]
                mean_rank_i3n=_mean([r.rank_i3n for r in qrows]),  # type: ignore[arg-type]
                mean_rank_citescore=_mean([r.rank_citescore for r in qrows]),  # type: ignore[arg-type]
                mean_rank_difference=_mean([r.rank_difference for r in qrows]),  # type: ignore[arg-type]
            )
        )
    return RankDifferenceResult(year, rows, summary)


# -- subjects -----------------------------------------------------------------

SubjectRef = tuple[Scheme, str]


def subjects_by_entry(
    assignments: Iterable[SubjectAssignment], matched: MatchedJournalSet
) -> dict[str, set[SubjectRef]]:
    """Entry key -> subjects, resolving assignments by journal id, ISSN or eISSN."""
    lookup = matched.lookup()
    out: dict[str, set[SubjectRef]] = defaultdict(set)
    for a in assignments:
        e = lookup.get(a.journal_id)
        if e is None:
            e = lookup.get(normalize_issn(a.journal_key) or a.journal_key)
        if e is not None:
            out[e.key].add((a.scheme, a.subject_id))
    return out


@dataclass(frozen=True)
class CrosswalkEdge:
    subject_a: SubjectRef
    subject_b: SubjectRef
    overlap: int


def subject_crosswalk(
    assignments: Iterable[SubjectAssignment],
    matched: MatchedJournalSet,
    threshold: int = DEFAULT_CROSSWALK_THRESHOLD,
) -> list[CrosswalkEdge]:
    """Cross-scheme subject pairs sharing more than ``threshold`` matched journals."""
    overlap: dict[tuple[SubjectRef, SubjectRef], int] = defaultdict(int)
    for subjects in subjects_by_entry(assignments, matched).values():
        ordered = sorted(subjects, key=lambda s: (s[0].value, s[1]))
        for a, b in itertools.combinations(ordered, 2):
            if a[0] != b[0]:
                overlap[(a, b)] += 1
    edges = [CrosswalkEdge(a, b, n) for (a, b), n in overlap.items() if n > threshold]
    return sorted(edges, key=lambda e: (e.subject_a[0].value, e.subject_a[1], e.subject_b[0].value, e.subject_b[1]))


def mapped_subject_groups(edges: Sequence[CrosswalkEdge]) -> list[tuple[SubjectRef, ...]]:
    """Cross-scheme triangles in the crosswalk; the edges themselves if no third scheme exists."""
    adj: dict[SubjectRef, set[SubjectRef]] = defaultdict(set)
    for e in edges:
        adj[e.subject_a].add(e.subject_b)
        adj[e.subject_b].add(e.subject_a)
    schemes = {s[0] for e in edges for s in (e.subject_a, e.subject_b)}
    key = lambda s: (s[0].value, s[1])  # noqa: E731
    if len(schemes) < 3:
        return [(e.subject_a, e.subject_b) for e in edges]
    triangles = set()
    for e in edges:
        for c in adj[e.subject_a] & adj[e.subject_b]:
            tri = tuple(sorted((e.subject_a, e.subject_b, c), key=key))
            if len({s[0] for s in tri}) == 3:
                triangles.add(tri)
    return sorted(triangles, key=lambda t: [key(s) for s in t])


@dataclass(frozen=True)
class SubjectTrend:
    subjects: tuple[SubjectRef, ...]
    indicator: str
    n: int
    direction: str | None
    stars: str | None
    test: TestResult | None
    unpaired: TestResult | None = None
    reason: str = ""


def subject_trend(
    subjects: Sequence[SubjectRef],
    matched: MatchedJournalSet,
    indicator: str,
    y1: int,
    y2: int,
    assignments: Iterable[SubjectAssignment] | None = None,
    *,
    entry_subjects: Mapping[str, set[SubjectRef]] | None = None,
) -> SubjectTrend:
    """Paired signed-rank trend of ``indicator`` from ``y1`` to ``y2``.

    Uses journals carrying every subject in ``subjects``. When paired coverage
    is below half of either year's population, an unpaired rank-sum result
    is attached as well.
    """
    if entry_subjects is None:
        entry_subjects = subjects_by_entry(assignments or (), matched)
    need = set(subjects)
    group = [e for e in matched.entries if need <= entry_subjects.get(e.key, set())]
    v1 = [e.value(indicator, y1) for e in group]
    v2 = [e.value(indicator, y2) for e in group]
    diffs = [b - a for a, b in zip(v1, v2) if a is not None and b is not None]
    if not diffs:
        return SubjectTrend(tuple(subjects), indicator, 0, None, None, None, None, "no journal with the indicator in both years")
    test = wilcoxon_signed_rank(diffs)
    med = statistics.median(diffs)
    direction = "up" if med > 0 else "down" if med < 0 else "flat"
    pop1 = [v for v in v1 if v is not None]
    pop2 = [v for v in v2 if v is not None]
    unpaired = None
    if len(diffs) < 0.5 * len(pop1) or len(diffs) < 0.5 * len(pop2):
        unpaired = wilcoxon_rank_sum(pop1, pop2)
    return SubjectTrend(tuple(subjects), indicator, len(diffs), direction, significance_stars(test.p_value), test, unpaired)


# -- publishers ---------------------------------------------------------------


@dataclass(frozen=True)
class PublisherShift:
    publisher: str
    n_y1: int
    n_y2: int
    median_y1: float | None
    median_y2: float | None
    delta_pct: float | None
    verdict: str
    n_paired: int
    p_value: float


def publisher_distribution(
    matched: MatchedJournalSet,
    y1: int,
    y2: int,
    min_journals: int = 5,
    indicator: str = "i3_n",
) -> list[PublisherShift]:
    """Median shift per publisher with a paired Wilcoxon verdict."""
    by_pub: dict[str, list[MatchedJournal]] = defaultdict(list)
    for e in matched.entries:
        if e.publisher:
            by_pub[e.publisher].append(e)
    out = []
    for pub in sorted(by_pub):
        es = by_pub[pub]
        a = [e.value(indicator, y1) for e in es]
        b = [e.value(indicator, y2) for e in es]
        pop1 = [v for v in a if v is not None]
        pop2 = [v for v in b if v is not None]
        if max(len(pop1), len(pop2)) < min_journals:
            continue
        m1 = statistics.median(pop1) if pop1 else None
        m2 = statistics.median(pop2) if pop2 else None
        delta = 100.0 * (m2 - m1) / m1 if m1 and m2 is not None else None
        diffs = [y - x for x, y in zip(a, b) if x is not None and y is not None]
        test = wilcoxon_signed_rank(diffs) if diffs else None
        verdict = "Stable"
        if test is not None and test.p_value < 0.05:
            sign = statistics.median(diffs)
            if sign == 0 and m1 is not None and m2 is not None:
                sign = m2 - m1
            verdict = "Increase" if sign > 0 else "Decrease" if sign < 0 else "Stable"
        out.append(
            PublisherShift(pub, len(pop1), len(pop2), m1, m2, delta, verdict, len(diffs), test.p_value if test else 1.0)
        )
    return out


# -- per-subject quartile shares ---------------------------------------------


@dataclass(frozen=True)
class SubjectQuartiles:
    subject_id: str
    label: str
    n: int
    counts: tuple[int, int, int, int]

    @property
    def proportions(self) -> tuple[float, float, float, float]:
        return tuple(c / self.n for c in self.counts)  # type: ignore[return-value]


@dataclass
class QuartileSubjectResult:
    scheme: Scheme
    subjects: list[SubjectQuartiles]
    top_q1: list[SubjectQuartiles]
    top_q4: list[SubjectQuartiles]


def quartile_subject_proportions(
    result: RankDifferenceResult,
    assignments: Iterable[SubjectAssignment],
    matched: MatchedJournalSet,
    scheme: Scheme | str,
    output_rank_cutoff: float = 0.25,
    top: int = 10,
) -> QuartileSubjectResult:
    """Quartile shares per subject for the largest subjects of one scheme.

    Only subjects whose journal count ranks within the top
    ``output_rank_cutoff`` share of subjects are kept (ties at the cutoff
    count are kept too).
    """
    scheme = Scheme(scheme)
    assignments = [a for a in assignments if a.scheme is scheme]
    if not assignments:
        raise ComparisonError(f"no subject assignments for scheme {scheme.value}")
    labels = {a.subject_id: a.subject_label for a in assignments}
    quartiles = result.quartile_of()
    counts: dict[str, list[int]] = defaultdict(lambda: [0, 0, 0, 0])
    for key, subs in subjects_by_entry(assignments, matched).items():
        q = quartiles.get(key)
        if q is None:
            continue
        for _, sid in subs:
            counts[sid][q - 1] += 1
    rows = [SubjectQuartiles(sid, labels.get(sid, ""), sum(c), tuple(c)) for sid, c in counts.items()]  # type: ignore[arg-type]
    if not rows:
        return QuartileSubjectResult(scheme, [], [], [])
    sizes = sorted((r.n for r in rows), reverse=True)
    k = max(1, math.ceil(len(sizes) * output_rank_cutoff))
    cutoff = sizes[k - 1]
    kept = sorted((r for r in rows if r.n >= cutoff), key=lambda r: r.subject_id)
    top_q1 = sorted(kept, key=lambda r: (-r.proportions[0], r.subject_id))[:top]
    top_q4 = sorted(kept, key=lambda r: (-r.proportions[3], r.subject_id))[:top]
    return QuartileSubjectResult(scheme, kept, top_q1, top_q4)


# -- distributions ------------------------------------------------------------


@dataclass(frozen=True)
class EcdfShiftPoint:
    indicator: str
    t: float
    f_y1: float
    f_y2: float
    diff: float


def ecdf_shift(
    matched: MatchedJournalSet, y1: int, y2: int, indicators: Sequence[str] = ("i3_n", "jif", "citescore")
) -> list[EcdfShiftPoint]:
    """``F_y2 - F_y1`` on the union of observed values, per indicator."""
    out = []
    for ind in indicators:
        a = [v for _, v in matched.column(ind, y1)]
        b = [v for _, v in matched.column(ind, y2)]
        if not a or not b:
            continue
        grid = np.unique(np.array(a + b))
        diff = ecdf_diff(b, a, grid)
        fa = np.searchsorted(np.sort(a), grid, side="right") / len(a)
        fb = fa + diff
        out.extend(EcdfShiftPoint(ind, float(t), float(x), float(y), float(d)) for t, x, y, d in zip(grid, fa, fb, diff))
    return out


def descriptive_table(
    matched: MatchedJournalSet, years: Iterable[int], indicators: Sequence[str] = ("jif", "citescore", "i3_n", "i3")
) -> list[tuple[str, int, DescriptiveStats]]:
    out = []
    for ind in indicators:
        for y in sorted(set(years)):
            vals = [v for _, v in matched.column(ind, y)]
            if vals:
                out.append((ind, y, describe(vals)))
    return out
