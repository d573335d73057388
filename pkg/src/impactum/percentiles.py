"""Cohort percentiles and the four I3 weight classes.

Papers are ranked inside (publication year, document type) cohorts by their
fractional citation count. A paper's percentile is the share of cohort
members with a strictly smaller count, so ties share the low value and an
all-zero cohort sits entirely at 0.
"""

from __future__ import annotations

import enum
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from .corpus import CorpusView, DocType
from .graph import DOC_TYPE_CODE, DOC_TYPES, CitationGraph

DEFAULT_DOC_TYPES: frozenset[DocType] = frozenset(
    {
        DocType.RESEARCH_ARTICLE,
        DocType.REVIEW_ARTICLE,
        DocType.CONFERENCE_PAPER,
        DocType.CASE_REPORT,
        DocType.CLINICAL_TRIAL,
    }
)
DEFAULT_WEIGHTS: tuple[int, int, int, int] = (100, 10, 2, 0)


class PercentileClass(str, enum.Enum):
    TOP1 = "Top1"
    TOP10 = "Top10"
    TOP50 = "Top50"
    BOTTOM50 = "Bottom50"


CLASS_ORDER = (PercentileClass.TOP1, PercentileClass.TOP10, PercentileClass.TOP50, PercentileClass.BOTTOM50)
# lower percentile bound of each band, in CLASS_ORDER
_BAND_FLOORS = (99.0, 90.0, 50.0, 0.0)


class CohortError(ValueError):
    pass


@dataclass(frozen=True)
class Cohort:
    year: int
    doc_type: DocType
    member_ids: tuple[str, ...]

    @property
    def size(self) -> int:
        return len(self.member_ids)


@dataclass(frozen=True, slots=True)
class PercentileClassification:
    paper_id: str
    fractional_count: float
    percentile: float
    cls: PercentileClass
    class_weight: int


def validate_weights(weights: Sequence[int]) -> tuple[int, int, int, int]:
    w = tuple(int(x) for x in weights)
    if len(w) != 4 or any(x < 0 for x in w) or any(a < b for a, b in zip(w, w[1:])):
        raise ValueError(f"weights must be four non-negative, non-increasing integers: {weights!r}")
    return w  # type: ignore[return-value]


def build_cohorts(
    view: CorpusView,
    publication_window: Iterable[int],
    included_doc_types: Iterable[DocType | str] = DEFAULT_DOC_TYPES,
) -> dict[tuple[int, DocType], Cohort]:
    years = set(publication_window)
    if not years:
        raise CohortError("empty publication window")
    types = {DocType(t) for t in included_doc_types}
    members: dict[tuple[int, DocType], list[str]] = {}
    for paper in view.papers.values():
        if paper.year in years and paper.doc_type in types:
            members.setdefault((paper.year, paper.doc_type), []).append(paper.paper_id)
    return {
        key: Cohort(key[0], key[1], tuple(ids))
        for key, ids in sorted(members.items(), key=lambda kv: (kv[0][0], kv[0][1].value))
    }


def percentile_of(paper_id: str, cohort: Cohort, fractional_counts: Mapping[str, float]) -> float:
    if paper_id not in cohort.member_ids:
        raise CohortError(f"{paper_id} is not a member of cohort ({cohort.year}, {cohort.doc_type.value})")
    mine = fractional_counts.get(paper_id, 0.0)
    below = sum(1 for pid in cohort.member_ids if fractional_counts.get(pid, 0.0) < mine)
    return 100.0 * below / cohort.size


def classify(percentile: float, weights: Sequence[int] = DEFAULT_WEIGHTS) -> tuple[PercentileClass, int]:
    """Map a percentile in [0, 100) to its band; bands are closed on the left."""
    if not 0.0 <= percentile < 100.0:
        raise ValueError(f"percentile out of range: {percentile}")
    for cls, floor, weight in zip(CLASS_ORDER, _BAND_FLOORS, weights):
        if percentile >= floor:
            return cls, int(weight)
    raise AssertionError("unreachable")


def _class_codes(percentiles: np.ndarray) -> np.ndarray:
    # index into CLASS_ORDER
    codes = np.full(percentiles.shape, 3, dtype=np.int64)
    codes[percentiles >= 50.0] = 2
    codes[percentiles >= 90.0] = 1
    codes[percentiles >= 99.0] = 0
    return codes


def cohort_class_counts(
    cohort: Cohort, classifications: Mapping[str, PercentileClassification]
) -> dict[PercentileClass, int]:
    counts = {cls: 0 for cls in CLASS_ORDER}
    for pid in cohort.member_ids:
        counts[classifications[pid].cls] += 1
    return counts


@dataclass
class ClassifiedCohorts:
    """Index-aligned classification arrays for one publication/citation window.

    ``member`` marks papers belonging to some cohort; for those papers
    ``percentile``, ``code`` (position in ``CLASS_ORDER``) and ``weight`` are
    set. Non-members carry ``code = -1`` and weight 0.
    """

    graph: CitationGraph
    counts: np.ndarray
    member: np.ndarray
    percentile: np.ndarray
    code: np.ndarray
    weight: np.ndarray
    weights: tuple[int, int, int, int]
    cohort_keys: list[tuple[int, DocType]]
    cohort_sizes: list[int]
    cohort_class_counts: list[tuple[int, int, int, int]]

    def classification(self, paper_id: str) -> PercentileClassification:
        i = self.graph.index[paper_id]
        if not self.member[i]:
            raise CohortError(f"{paper_id} is not in any cohort")
        return PercentileClassification(
            paper_id,
            float(self.counts[i]),
            float(self.percentile[i]),
            CLASS_ORDER[self.code[i]],
            int(self.weight[i]),
        )

    def as_mapping(self) -> dict[str, PercentileClassification]:
        return {self.graph.paper_ids[i]: self.classification(self.graph.paper_ids[i]) for i in np.flatnonzero(self.member)}


def classify_all(
    graph: CitationGraph,
    publication_window: Iterable[int],
    citation_window: Iterable[int],
    included_doc_types: Iterable[DocType | str] = DEFAULT_DOC_TYPES,
    weights: Sequence[int] = DEFAULT_WEIGHTS,
) -> ClassifiedCohorts:
    """Classify every cohort member in one vectorized pass.

    Equivalent to :func:`build_cohorts` + :func:`percentile_of` +
    :func:`classify` per paper, at sort cost instead of quadratic cost.
    """
    weights = validate_weights(weights)
    pub_years = np.array(sorted(set(publication_window)), dtype=np.int64)
    if pub_years.size == 0:
        raise CohortError("empty publication window")
    type_codes = np.array(sorted(DOC_TYPE_CODE[DocType(t)] for t in included_doc_types), dtype=np.int64)
    counts = graph.fractional_counts(citation_window)
    n = len(graph)
    member = np.isin(graph.years, pub_years) & np.isin(graph.doc_types, type_codes)
    percentile = np.zeros(n, dtype=np.float64)
    code = np.full(n, -1, dtype=np.int64)

    idx = np.flatnonzero(member)
    keys: list[tuple[int, DocType]] = []
    sizes: list[int] = []
    class_counts: list[tuple[int, int, int, int]] = []
    if idx.size:
        # group members by (year, doc_type)
        group_key = graph.years[idx] * len(DOC_TYPES) + graph.doc_types[idx]
        order = np.lexsort((idx, group_key))
        idx, group_key = idx[order], group_key[order]
        uniq, starts = np.unique(group_key, return_index=True)
        bounds = list(starts) + [idx.size]
        for g, k in enumerate(uniq.tolist()):
            members = idx[bounds[g] : bounds[g + 1]]
            vals = counts[members]
            below = np.searchsorted(np.sort(vals), vals, side="left")
            pct = 100.0 * below / members.size
            percentile[members] = pct
            c = _class_codes(pct)
            code[members] = c
            keys.append((k // len(DOC_TYPES), DOC_TYPES[k % len(DOC_TYPES)]))
            sizes.append(int(members.size))
            class_counts.append(tuple(int(x) for x in np.bincount(c, minlength=4)))  # type: ignore[misc]
    weight_arr = np.zeros(n, dtype=np.int64)
    weight_arr[member] = np.asarray(weights, dtype=np.int64)[code[member]]
    return ClassifiedCohorts(graph, counts, member, percentile, code, weight_arr, weights, keys, sizes, class_counts)
