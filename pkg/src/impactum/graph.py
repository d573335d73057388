"""Citation edges with per-citing-paper fractional weights.

Each resolved reference from a citing paper ``i`` becomes one edge carrying
weight ``1/m_i`` where ``m_i`` is the citing paper's reference count (see
:func:`effective_reference_count`). Fractional counts are computed with
``math.fsum`` so the result does not depend on edge order.
"""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np

from .corpus import CorpusView, DocType, PaperRecord, normalize_doi

DOC_TYPES: tuple[DocType, ...] = tuple(DocType)
DOC_TYPE_CODE = {dt: i for i, dt in enumerate(DOC_TYPES)}


class UnknownPaperError(KeyError):
    """The paper id is not part of the corpus the graph was built from."""


@dataclass(frozen=True)
class ResolutionStats:
    references_seen: int = 0
    edges_resolved: int = 0
    unresolved: int = 0
    self_loops_dropped: int = 0
    duplicates_collapsed: int = 0

    def reconciles(self) -> bool:
        return self.references_seen == (
            self.edges_resolved + self.unresolved + self.self_loops_dropped + self.duplicates_collapsed
        )


@dataclass(frozen=True, slots=True)
class CitationEdge:
    citing_id: str
    cited_id: str
    weight: float


def effective_reference_count(paper: PaperRecord) -> int:
    """Declared bibliography size if positive, else listed entries, else 1."""
    if paper.declared_reference_count:
        return paper.declared_reference_count
    if paper.references:
        return len(paper.references)
    return 1


def _year_array(window: Iterable[int]) -> np.ndarray:
    years = np.array(sorted(set(int(y) for y in window)), dtype=np.int64)
    if years.size == 0:
        raise ValueError("empty year window")
    return years


class CitationGraph:
    """Array-backed citation graph over a sealed corpus.

    Papers are indexed in sorted-id order. ``citing``/``cited`` hold one
    entry per distinct edge, sorted by (citing, cited).
    """

    def __init__(self, view: CorpusView) -> None:
        self.view = view
        self.paper_ids: list[str] = list(view.papers)
        self.index = {pid: i for i, pid in enumerate(self.paper_ids)}
        journal_ids = list(view.journals)
        self.journal_ids = journal_ids
        self.journal_index = {jid: i for i, jid in enumerate(journal_ids)}
        n = len(self.paper_ids)
        self.years = np.empty(n, dtype=np.int64)
        self.doc_types = np.empty(n, dtype=np.int64)
        self.journal = np.full(n, -1, dtype=np.int64)
        self.m = np.empty(n, dtype=np.int64)

        seen = unresolved = self_loops = 0
        pairs: list[int] = []
        resolve = view.resolve_reference
        index = self.index
        by_doi = {doi: index[pid] for doi, pid in view.doi_index.items()}
        years, types, journal, m = [], [], [], []
        for i, paper in enumerate(view.papers.values()):
            years.append(paper.year)
            types.append(DOC_TYPE_CODE[paper.doc_type])
            journal.append(self.journal_index.get(paper.journal_id, -1) if paper.journal_id else -1)
            m.append(effective_reference_count(paper))
            base = i * n
            seen += len(paper.references)
            for ref in paper.references:
                target = index.get(ref)
                if target is None:
                    target = by_doi.get(normalize_doi(ref))
                    if target is None:
                        unresolved += 1
                        continue
                if target == i:
                    self_loops += 1
                else:
                    pairs.append(base + target)
        self.years[:] = years
        self.doc_types[:] = types
        self.journal[:] = journal
        self.m[:] = m
        for citing_id, cited_id in view.extra_edges:
            seen += 1
            ci = self.index.get(citing_id)
            pid = resolve(cited_id)
            ti = self.index.get(pid) if pid is not None else None
            if ci is None or ti is None:
                unresolved += 1
            elif ci == ti:
                self_loops += 1
            else:
                pairs.append(ci * n + ti)

        encoded = np.unique(np.array(pairs, dtype=np.int64))
        self.citing = encoded // max(n, 1)
        self.cited = encoded % max(n, 1)
        self.weights = 1.0 / self.m[self.citing]
        self.stats = ResolutionStats(
            references_seen=seen,
            edges_resolved=int(encoded.size),
            unresolved=unresolved,
            self_loops_dropped=self_loops,
            duplicates_collapsed=len(pairs) - int(encoded.size),
        )
        # incoming-edge CSR layout for single-paper queries
        order = np.argsort(self.cited, kind="stable")
        self._in_citing = self.citing[order]
        self._in_ptr = np.searchsorted(self.cited[order], np.arange(n + 1))
        self._frac_cache: dict[tuple[int, ...], np.ndarray] = {}

    def __len__(self) -> int:
        return len(self.paper_ids)

    def edges(self) -> Iterable[CitationEdge]:
        ids = self.paper_ids
        for c, t, w in zip(self.citing.tolist(), self.cited.tolist(), self.weights.tolist()):
            yield CitationEdge(ids[c], ids[t], w)

    def _idx(self, paper_id: str) -> int:
        try:
            return self.index[paper_id]
        except KeyError:
            raise UnknownPaperError(paper_id) from None

    def _in_window(self, idx: int, window: Iterable[int]) -> np.ndarray:
        citers = self._in_citing[self._in_ptr[idx] : self._in_ptr[idx + 1]]
        return citers[np.isin(self.years[citers], _year_array(window))]

    def fractional_citation_count(self, paper_id: str, citation_window: Iterable[int]) -> float:
        """Sum of ``1/m`` over citing papers published inside the window."""
        citers = self._in_window(self._idx(paper_id), citation_window)
        return math.fsum((1.0 / self.m[citers]).tolist())

    def integer_citation_count(self, paper_id: str, citation_window: Iterable[int]) -> int:
        return int(self._in_window(self._idx(paper_id), citation_window).size)

    def edge_mask(self, citing_years: Iterable[int]) -> np.ndarray:
        return np.isin(self.years[self.citing], _year_array(citing_years))

    def fractional_counts(self, citation_window: Iterable[int]) -> np.ndarray:
        """Fractional citation count for every paper (index-aligned)."""
        years = _year_array(citation_window)
        key = tuple(years.tolist())
        cached = self._frac_cache.get(key)
        if cached is not None:
            return cached
        mask = np.isin(self.years[self.citing], years)
        cited = self.cited[mask]
        w = self.weights[mask]
        order = np.argsort(cited, kind="stable")
        cited, w = cited[order], w[order].tolist()
        out = np.zeros(len(self), dtype=np.float64)
        if cited.size:
            targets, starts = np.unique(cited, return_index=True)
            bounds = starts.tolist() + [cited.size]
            fsum = math.fsum
            for k, t in enumerate(targets.tolist()):
                out[t] = fsum(w[bounds[k] : bounds[k + 1]])
        self._frac_cache[key] = out
        return out

    def integer_counts(self, citation_window: Iterable[int]) -> np.ndarray:
        mask = self.edge_mask(citation_window)
        return np.bincount(self.cited[mask], minlength=len(self)).astype(np.int64)

    def integer_counts_upto(self, year: int) -> np.ndarray:
        mask = self.years[self.citing] <= year
        return np.bincount(self.cited[mask], minlength=len(self)).astype(np.int64)


def build_graph(view: CorpusView) -> tuple[CitationGraph, ResolutionStats]:
    graph = CitationGraph(view)
    return graph, graph.stats
