"""Journal-level indicators: I3, I3/N, JIF, CiteScore and the h family.

:class:`IndicatorEngine` produces a full :class:`IndicatorRow` table per
indicator year with array operations. The per-journal ``compute_*``
functions are direct, readable versions of the same formulas and are what
the engine is tested against.
"""

from __future__ import annotations

import logging
import math
import statistics
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from .corpus import CorpusView, DocType
from .graph import DOC_TYPE_CODE, CitationGraph
from .percentiles import (
    DEFAULT_DOC_TYPES,
    DEFAULT_WEIGHTS,
    ClassifiedCohorts,
    PercentileClassification,
    classify_all,
    validate_weights,
)

logger = logging.getLogger(__name__)

CITABLE_TYPES: frozenset[DocType] = frozenset({DocType.RESEARCH_ARTICLE, DocType.REVIEW_ARTICLE})
CI_Z = 1.96


@dataclass(frozen=True)
class WindowPolicy:
    year: int
    i3_pub_years: frozenset[int]
    i3_cite_years: frozenset[int]
    jif_item_years: frozenset[int]
    jif_cite_year: frozenset[int]
    citescore_item_years: frozenset[int]
    citescore_cite_year: frozenset[int]
    h5_pub_years: frozenset[int]

    @classmethod
    def for_year(
        cls,
        year: int,
        *,
        i3_pub_offsets: Sequence[int] = (3, 2),
        i3_cite_offsets: Sequence[int] = (3, 2, 1, 0),
    ) -> WindowPolicy:
        policy = cls(
            year=year,
            i3_pub_years=frozenset(year - k for k in i3_pub_offsets),
            i3_cite_years=frozenset(year - k for k in i3_cite_offsets),
            jif_item_years=frozenset({year - 1, year - 2}),
            jif_cite_year=frozenset({year}),
            citescore_item_years=frozenset({year - 1, year - 2, year - 3, year - 4}),
            citescore_cite_year=frozenset({year}),
            h5_pub_years=frozenset(range(year - 4, year + 1)),
        )
        if not policy.i3_pub_years or not policy.i3_cite_years:
            raise ValueError("I3 windows must be non-empty")
        if min(policy.i3_cite_years) < min(policy.i3_pub_years):
            raise ValueError("I3 citation window starts before the publication window")
        return policy


@dataclass(frozen=True)
class IndicatorRow:
    journal_id: str
    year: int
    n_pubs: int
    i3: int
    i3_n: float | None
    jif: float | None
    citescore: float | None
    h_index: int
    i10_index: int
    h5_index: int
    citations: int = 0
    jif_flag: bool = False

    CSV_FIELDS = ("journal_id", "year", "n_pubs", "i3", "i3_n", "jif", "citescore", "h", "i10", "h5", "citations")

    def to_record(self) -> dict[str, object]:
        return {
            "journal_id": self.journal_id,
            "year": self.year,
            "n_pubs": self.n_pubs,
            "i3": self.i3,
            "i3_n": self.i3_n,
            "jif": self.jif,
            "citescore": self.citescore,
            "h": self.h_index,
            "i10": self.i10_index,
            "h5": self.h5_index,
            "citations": self.citations,
        }


@dataclass(frozen=True)
class DescriptiveStats:
    n: int
    min: float
    mean: float
    median: float
    max: float
    ci95_low: float
    ci95_high: float
    sd: float
    se: float


def describe(values: Iterable[float]) -> DescriptiveStats:
    """Table-style summary. Sample SD; a single value gets SD 0 and a collapsed CI."""
    xs = [float(v) for v in values]
    if not xs:
        raise ValueError("describe() needs at least one value")
    n = len(xs)
    mean = math.fsum(xs) / n
    sd = statistics.stdev(xs) if n > 1 else 0.0
    se = sd / math.sqrt(n)
    return DescriptiveStats(
        n=n,
        min=min(xs),
        mean=mean,
        median=statistics.median(xs),
        max=max(xs),
        ci95_low=mean - CI_Z * se,
        ci95_high=mean + CI_Z * se,
        sd=sd,
        se=se,
    )


# -- per-journal reference implementations ----------------------------------


def _journal_papers(view: CorpusView, journal_id: str):
    return [p for p in view.papers.values() if p.journal_id == journal_id]


def compute_i3(
    view: CorpusView,
    journal_id: str,
    classifications: Mapping[str, PercentileClassification],
    policy: WindowPolicy,
) -> int:
    """Sum of class weights over the journal's classified in-window papers."""
    return sum(
        classifications[p.paper_id].class_weight
        for p in _journal_papers(view, journal_id)
        if p.year in policy.i3_pub_years and p.paper_id in classifications
    )


def compute_i3n(i3: int, n_pubs: int) -> float | None:
    return i3 / n_pubs if n_pubs > 0 else None


def _ratio_indicator(
    view: CorpusView,
    graph: CitationGraph,
    journal_id: str,
    item_years: frozenset[int],
    cite_years: frozenset[int],
    denominator_types: frozenset[DocType] | None,
) -> tuple[int, int]:
    papers = [p for p in _journal_papers(view, journal_id) if p.year in item_years]
    num = sum(graph.integer_citation_count(p.paper_id, cite_years) for p in papers)
    den = sum(1 for p in papers if denominator_types is None or p.doc_type in denominator_types)
    return num, den


def compute_jif(
    view: CorpusView, graph: CitationGraph, journal_id: str, policy: WindowPolicy
) -> tuple[float | None, bool]:
    """Returns ``(jif, asymmetry_flag)``.

    The numerator counts citations to every item of the journal; only
    research and review articles enter the denominator. A positive numerator
    over zero citable items yields ``(None, True)``.
    """
    num, den = _ratio_indicator(view, graph, journal_id, policy.jif_item_years, policy.jif_cite_year, CITABLE_TYPES)
    if den == 0:
        return None, num > 0
    return num / den, False


def compute_citescore(
    view: CorpusView, graph: CitationGraph, journal_id: str, policy: WindowPolicy
) -> float | None:
    num, den = _ratio_indicator(
        view, graph, journal_id, policy.citescore_item_years, policy.citescore_cite_year, None
    )
    return num / den if den else None


def h_index(citations: Iterable[int]) -> int:
    h = 0
    for rank, c in enumerate(sorted(citations, reverse=True), start=1):
        if c >= rank:
            h = rank
        else:
            break
    return h


def compute_h_family(
    view: CorpusView, graph: CitationGraph, journal_id: str, policy: WindowPolicy
) -> tuple[int, int, int]:
    upto = range(min(graph.years.min(initial=policy.year), policy.year), policy.year + 1)
    papers = [p for p in _journal_papers(view, journal_id) if p.year <= policy.year]
    counts = {p.paper_id: graph.integer_citation_count(p.paper_id, upto) for p in papers}
    h = h_index(counts.values())
    i10 = sum(1 for c in counts.values() if c >= 10)
    h5 = h_index(counts[p.paper_id] for p in papers if p.year in policy.h5_pub_years)
    return h, i10, h5


# -- vectorized engine -------------------------------------------------------


def _grouped_h(journal: np.ndarray, counts: np.ndarray, n_journals: int) -> np.ndarray:
    out = np.zeros(n_journals, dtype=np.int64)
    if journal.size == 0:
        return out
    order = np.lexsort((-counts, journal))
    j, c = journal[order], counts[order]
    starts = np.searchsorted(j, np.arange(n_journals))
    rank = np.arange(j.size) - starts[j] + 1
    hit = c >= rank
    np.maximum.at(out, j[hit], rank[hit])
    return out


@dataclass
class IndicatorEngine:
    graph: CitationGraph
    weights: tuple[int, int, int, int] = DEFAULT_WEIGHTS
    doc_types: frozenset[DocType] = DEFAULT_DOC_TYPES
    policy_overrides: dict[str, Sequence[int]] = field(default_factory=dict)
    asymmetries: dict[int, list[str]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.weights = validate_weights(self.weights)
        self.doc_types = frozenset(DocType(t) for t in self.doc_types)
        self._classified: dict[int, ClassifiedCohorts] = {}

    def policy(self, year: int) -> WindowPolicy:
        return WindowPolicy.for_year(year, **self.policy_overrides)

    def classified(self, year: int) -> ClassifiedCohorts:
        if year not in self._classified:
            p = self.policy(year)
            self._classified[year] = classify_all(
                self.graph, p.i3_pub_years, p.i3_cite_years, self.doc_types, self.weights
            )
        return self._classified[year]

    def table(self, year: int) -> list[IndicatorRow]:
        """One row per journal in the corpus, sorted by journal id."""
        g = self.graph
        p = self.policy(year)
        nj = len(g.journal_ids)
        cc = self.classified(year)

        linked = g.journal >= 0
        sel = cc.member & linked
        n_pubs = np.bincount(g.journal[sel], minlength=nj)
        i3 = np.zeros(nj, dtype=np.int64)
        np.add.at(i3, g.journal[sel], cc.weight[sel])
        cites_i3 = g.integer_counts(p.i3_cite_years)
        citations = np.zeros(nj, dtype=np.int64)
        np.add.at(citations, g.journal[sel], cites_i3[sel])

        citer_year = g.years[g.citing]
        cited_journal = g.journal[g.cited]
        cited_year = g.years[g.cited]
        citable_codes = [DOC_TYPE_CODE[t] for t in CITABLE_TYPES]

        def ratio(item_years, cite_years, citable_only):
            items = np.array(sorted(item_years))
            emask = np.isin(citer_year, sorted(cite_years)) & np.isin(cited_year, items) & (cited_journal >= 0)
            num = np.bincount(cited_journal[emask], minlength=nj)
            pmask = linked & np.isin(g.years, items)
            if citable_only:
                pmask &= np.isin(g.doc_types, citable_codes)
            den = np.bincount(g.journal[pmask], minlength=nj)
            return num, den

        jif_num, jif_den = ratio(p.jif_item_years, p.jif_cite_year, True)
        cs_num, cs_den = ratio(p.citescore_item_years, p.citescore_cite_year, False)

        upto = g.integer_counts_upto(year)
        hmask = linked & (g.years <= year)
        h = _grouped_h(g.journal[hmask], upto[hmask], nj)
        i10 = np.bincount(g.journal[hmask & (upto >= 10)], minlength=nj)
        h5mask = hmask & np.isin(g.years, sorted(p.h5_pub_years))
        h5 = _grouped_h(g.journal[h5mask], upto[h5mask], nj)

        rows = []
        flagged = []
        for k, jid in enumerate(g.journal_ids):
            flag = bool(jif_den[k] == 0 and jif_num[k] > 0)
            if flag:
                flagged.append(jid)
            rows.append(
                IndicatorRow(
                    journal_id=jid,
                    year=year,
                    n_pubs=int(n_pubs[k]),
                    i3=int(i3[k]),
                    i3_n=int(i3[k]) / int(n_pubs[k]) if n_pubs[k] else None,
                    jif=int(jif_num[k]) / int(jif_den[k]) if jif_den[k] else None,
                    citescore=int(cs_num[k]) / int(cs_den[k]) if cs_den[k] else None,
                    h_index=int(h[k]),
                    i10_index=int(i10[k]),
                    h5_index=int(h5[k]),
                    citations=int(citations[k]),
                    jif_flag=flag,
                )
            )
        self.asymmetries[year] = flagged
        if flagged:
            logger.warning(
                "JIF numerator-denominator asymmetry in %d journal(s) for %d: citations to items "
                "but no citable items (JIF left undefined)",
                len(flagged),
                year,
            )
        return rows

    def tables(self, years: Iterable[int]) -> list[IndicatorRow]:
        rows = [r for y in sorted(set(years)) for r in self.table(y)]
        return sorted(rows, key=lambda r: (r.journal_id, r.year))

