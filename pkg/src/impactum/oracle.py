"""Brute-force reference computation of I3, I3/N, JIF and CiteScore.

Deliberately shares no code with the engine modules: it works straight from
the raw ``papers``/``edges`` records, resolves references itself, and finds
each paper's strictly-below count by comparing it with every other cohort
member. Only meant for corpora up to ``MAX_PAPERS`` papers.
"""

from __future__ import annotations

import math
from collections import defaultdict
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np

MAX_PAPERS = 200_000
INCLUDED = ("research_article", "review_article", "conference_paper", "case_report", "clinical_trial")
CITABLE = ("research_article", "review_article")
_CHUNK = 2048


class OracleRefused(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleIndicators:
    i3: int
    i3_n: float | None
    jif: float | None
    citescore: float | None


def _doi_key(s: str | None) -> str | None:
    if not s:
        return None
    s = s.strip().lower()
    for prefix in ("https://doi.org/", "http://doi.org/", "https://dx.doi.org/", "http://dx.doi.org/", "doi:"):
        if s.startswith(prefix):
            s = s[len(prefix) :].strip()
    return s or None


def _below_counts(values: list[float]) -> list[int]:
    """For each value, how many values in the list are strictly smaller (pairwise comparison)."""
    v = np.asarray(values, dtype=np.float64)
    out = np.empty(v.size, dtype=np.int64)
    for start in range(0, v.size, _CHUNK):
        block = v[start : start + _CHUNK]
        out[start : start + block.size] = (v[None, :] < block[:, None]).sum(axis=1)
    return out.tolist()


def _band(below: int, n: int) -> int:
    # 0 = top 1%, 1 = next 9%, 2 = next 40%, 3 = bottom half
    if 100 * below >= 99 * n:
        return 0
    if 100 * below >= 90 * n:
        return 1
    if 100 * below >= 50 * n:
        return 2
    return 3


class Oracle:
    def __init__(
        self,
        papers: Iterable[Mapping[str, Any]],
        journals: Iterable[Mapping[str, Any]],
        edges: Iterable[Mapping[str, str]] = (),
    ) -> None:
        self.papers = {p["id"]: p for p in papers}
        if len(self.papers) > MAX_PAPERS:
            raise OracleRefused(f"{len(self.papers)} papers exceeds the oracle limit of {MAX_PAPERS}")
        self.journal_ids = sorted(j["id"] for j in journals)
        by_doi = {}
        for pid, p in self.papers.items():
            k = _doi_key(p.get("doi"))
            if k is not None:
                by_doi.setdefault(k, pid)

        def resolve(ref: str) -> str | None:
            if ref in self.papers:
                return ref
            return by_doi.get(_doi_key(ref) or "")

        self.refcount = {}
        for pid, p in self.papers.items():
            if p.get("ref_count"):
                self.refcount[pid] = p["ref_count"]
            elif p.get("references"):
                self.refcount[pid] = len(p["references"])
            else:
                self.refcount[pid] = 1

        cites: set[tuple[str, str]] = set()
        for pid, p in self.papers.items():
            for ref in p.get("references") or []:
                t = resolve(ref)
                if t is not None and t != pid:
                    cites.add((pid, t))
        for e in edges:
            c, t = e["citing"], resolve(e["cited"])
            if c in self.papers and t is not None and t != c:
                cites.add((c, t))
        self.cited_by: dict[str, list[str]] = defaultdict(list)
        for c, t in cites:
            self.cited_by[t].append(c)

    def year(self, pid: str) -> int:
        return self.papers[pid]["year"]

    def fractional(self, pid: str, years: set[int]) -> float:
        return math.fsum(1.0 / self.refcount[c] for c in self.cited_by.get(pid, ()) if self.year(c) in years)

    def classes(self, Y: int, doc_types: Sequence[str] = INCLUDED) -> dict[str, int]:
        """Band index per cohort member for indicator year ``Y``."""
        pub = {Y - 3, Y - 2}
        cite = set(range(Y - 3, Y + 1))
        cohorts: dict[tuple[int, str], list[str]] = defaultdict(list)
        for pid, p in self.papers.items():
            if p["year"] in pub and p["doc_type"] in doc_types:
                cohorts[(p["year"], p["doc_type"])].append(pid)
        out = {}
        for members in cohorts.values():
            counts = [self.fractional(pid, cite) for pid in members]
            for pid, below in zip(members, _below_counts(counts)):
                out[pid] = _band(below, len(members))
        return out

    def table(
        self,
        Y: int,
        weights: Sequence[int] = (100, 10, 2, 0),
        doc_types: Sequence[str] = INCLUDED,
    ) -> dict[str, OracleIndicators]:
        classes = self.classes(Y, doc_types)
        i3: dict[str, int] = defaultdict(int)
        n: dict[str, int] = defaultdict(int)
        for pid, band in classes.items():
            j = self.papers[pid].get("journal_id")
            i3[j] += weights[band]
            n[j] += 1

        def ratio(items: set[int], citable_only: bool) -> tuple[dict, dict]:
            num: dict[str, int] = defaultdict(int)
            den: dict[str, int] = defaultdict(int)
            for pid, p in self.papers.items():
                if p["year"] not in items:
                    continue
                j = p.get("journal_id")
                if not citable_only or p["doc_type"] in CITABLE:
                    den[j] += 1
                num[j] += sum(1 for c in self.cited_by.get(pid, ()) if self.year(c) == Y)
            return num, den

        jn, jd = ratio({Y - 1, Y - 2}, True)
        cn, cd = ratio({Y - 1, Y - 2, Y - 3, Y - 4}, False)
        out = {}
        for j in self.journal_ids:
            out[j] = OracleIndicators(
                i3=i3[j],
                i3_n=i3[j] / n[j] if n[j] else None,
                jif=jn[j] / jd[j] if jd[j] else None,
                citescore=cn[j] / cd[j] if cd[j] else None,
            )
        return out


def oracle_indicators(corpus: Any, journal_id: str, Y: int, weights: Sequence[int] = (100, 10, 2, 0)) -> OracleIndicators:
    """Indicators for one journal of a synthetic corpus (anything with papers/journals/edges)."""
    oracle = Oracle(corpus.papers, corpus.journals, corpus.edges)
    if journal_id not in oracle.journal_ids:
        return OracleIndicators(0, None, None, None)
    return oracle.table(Y, weights)[journal_id]
