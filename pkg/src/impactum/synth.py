"""Seeded synthetic corpora with skewed citation structure.

Papers receive a latent "fitness"; each citing paper draws its in-corpus
references from older papers with probability proportional to fitness,
mostly inside its own field. The output uses exactly the ingest formats
(``papers.jsonl``, ``journals.jsonl``, ``edges.jsonl``, ``subjects.csv``).

Randomness comes from numpy's PCG64 bit generator, whose stream is fixed
across platforms for a given seed.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .corpus import Corpus, CorpusView, issn_check_digit

DEFAULT_DOC_TYPE_MIX: Mapping[str, float] = {
    "research_article": 0.75,
    "review_article": 0.08,
    "conference_paper": 0.05,
    "case_report": 0.03,
    "clinical_trial": 0.01,
    "editorial": 0.04,
    "letter": 0.02,
    "book_chapter": 0.01,
    "other": 0.01,
}
_DOC_FITNESS = {"review_article": 2.0, "editorial": 0.3, "letter": 0.3}
CITATION_MODELS = ("lognormal", "powerlaw", "planted")
SCHEME_PREFIX = {"scilit": "S", "scopus_asjc": "2", "wos_category": "W"}


class InfeasibleConfig(ValueError):
    pass


@dataclass(frozen=True)
class JournalTier:
    """One group of journals in the planted model."""

    name: str
    share: float
    size_weight: float = 1.0
    fitness_mu: float = 0.0
    fitness_sigma: float = 1.0
    hot_prob: float = 0.0
    hot_boost: float = 1.0
    field: int = 0
    mean_refs: float | None = None


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int = 0
    n_journals: int = 40
    n_papers: int = 4000
    year_range: tuple[int, int] = (2016, 2024)
    doc_type_mix: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_DOC_TYPE_MIX))
    citation_model: str = "lognormal"
    lognormal_mu: float = 0.0
    lognormal_sigma: float = 1.2
    powerlaw_alpha: float = 2.5
    tiers: tuple[JournalTier, ...] = ()
    n_fields: int = 4
    mean_refs: float = 20.0
    coverage: float = 0.5
    field_locality: float = 0.8
    n_publishers: int = 5
    undeclared_rate: float = 0.05
    bare_rate: float = 0.01
    doi_ref_rate: float = 0.2
    unresolved_rate: float = 0.3
    self_cite_rate: float = 0.002

    def validate(self) -> None:
        if self.n_journals < 1 or self.n_papers < 1:
            raise InfeasibleConfig("n_journals and n_papers must be positive")
        if self.year_range[0] > self.year_range[1]:
            raise InfeasibleConfig("empty year range")
        if abs(math.fsum(self.doc_type_mix.values()) - 1.0) > 1e-9:
            raise InfeasibleConfig("doc_type_mix must sum to 1")
        if self.citation_model not in CITATION_MODELS:
            raise InfeasibleConfig(f"unknown citation model {self.citation_model!r}")
        if self.citation_model == "planted":
            if not self.tiers:
                raise InfeasibleConfig("planted model needs tiers")
            if abs(math.fsum(t.share for t in self.tiers) - 1.0) > 1e-9:
                raise InfeasibleConfig("tier shares must sum to 1")
        if self.mean_refs < 1:
            raise InfeasibleConfig("mean_refs must be at least 1")
        if self.mean_refs * self.coverage > self.n_papers - 1:
            raise InfeasibleConfig(
                f"{self.mean_refs * self.coverage:g} in-corpus references per paper demanded "
                f"but only {self.n_papers - 1} other papers exist"
            )


@dataclass
class SyntheticCorpus:
    config: GeneratorConfig
    papers: list[dict[str, Any]]
    journals: list[dict[str, Any]]
    edges: list[dict[str, str]]
    subjects: list[dict[str, str]]
    journal_tier: dict[str, str]

    def papers_jsonl(self) -> str:
        return "".join(json.dumps(p, sort_keys=True) + "\n" for p in self.papers)

    def journals_jsonl(self) -> str:
        return "".join(json.dumps(j, sort_keys=True) + "\n" for j in self.journals)

    def edges_jsonl(self) -> str:
        return "".join(json.dumps(e, sort_keys=True) + "\n" for e in self.edges)

    def subjects_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, ["journal_key", "scheme", "subject_id", "subject_label"], lineterminator="\n")
        w.writeheader()
        w.writerows(self.subjects)
        return buf.getvalue()

    def write(self, out: Path) -> dict[str, Path]:
        out.mkdir(parents=True, exist_ok=True)
        files = {
            "papers": (out / "papers.jsonl", self.papers_jsonl()),
            "journals": (out / "journals.jsonl", self.journals_jsonl()),
            "edges": (out / "edges.jsonl", self.edges_jsonl()),
            "subjects": (out / "subjects.csv", self.subjects_csv()),
        }
        for path, text in files.values():
            path.write_text(text, encoding="utf-8")
        return {k: v[0] for k, v in files.items()}

    def to_view(self) -> CorpusView:
        corpus = Corpus()
        corpus.ingest_journals(self.journals)
        corpus.ingest_papers(self.papers)
        corpus.ingest_edges(self.edges)
        schemes: dict[str, list[dict[str, str]]] = {}
        for row in self.subjects:
            schemes.setdefault(row["scheme"], []).append(row)
        for name, rows in sorted(schemes.items()):
            corpus.ingest_subject_assignments(rows, name)
        return corpus.seal()


# elite journals, a broad middle, and a small low-density field whose rare
# hits are cited by papers with short bibliographies
PLANTED_TIERS: tuple[JournalTier, ...] = (
    JournalTier("elite", 0.15, size_weight=1.5, fitness_mu=1.2, fitness_sigma=0.8, field=0),
    JournalTier("core", 0.45, size_weight=1.0, fitness_mu=0.0, fitness_sigma=1.0, field=1),
    JournalTier("applied", 0.25, size_weight=1.0, fitness_mu=-0.2, fitness_sigma=1.0, field=2),
    JournalTier(
        "niche",
        0.15,
        size_weight=0.3,
        fitness_mu=-0.5,
        fitness_sigma=1.0,
        hot_prob=0.04,
        hot_boost=25.0,
        field=3,
        mean_refs=6.0,
    ),
)


def _issn(rng: np.random.Generator, used: set[str]) -> str:
    while True:
        body = "".join(str(d) for d in rng.integers(0, 10, size=7))
        full = body + issn_check_digit(body)
        if full not in used:
            used.add(full)
            return f"{full[:4]}-{full[4:]}"


def _default_tiers(cfg: GeneratorConfig) -> tuple[JournalTier, ...]:
    if cfg.citation_model == "planted":
        return cfg.tiers
    share = 1.0 / cfg.n_fields
    return tuple(
        JournalTier(f"field{f}", share, fitness_mu=cfg.lognormal_mu, fitness_sigma=cfg.lognormal_sigma, field=f)
        for f in range(cfg.n_fields)
    )


def generate(config: GeneratorConfig) -> SyntheticCorpus:
    config.validate()
    cfg = config
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    tiers = _default_tiers(cfg)

    # journals
    nj = cfg.n_journals
    tier_of_journal = np.sort(rng.choice(len(tiers), size=nj, p=[t.share for t in tiers]))
    used: set[str] = set()
    journals = []
    journal_tier = {}
    size = np.empty(nj)
    for k in range(nj):
        t = tiers[tier_of_journal[k]]
        jid = f"J{k:05d}"
        pub = int(rng.integers(0, cfg.n_publishers))
        rec = {
            "id": jid,
            "title": f"Synthetic Journal of {t.name.title()} {k}",
            "issn": [_issn(rng, used)],
            "eissn": [_issn(rng, used)] if rng.random() < 0.6 else [],
            "publisher_id": f"PUB{pub:03d}",
            "publisher_name": f"Publisher {pub}",
        }
        journals.append(rec)
        journal_tier[jid] = t.name
        size[k] = t.size_weight * rng.lognormal(0.0, 0.5)

    # papers: journal, year, type
    n = cfg.n_papers
    forced = np.arange(min(nj, n))
    rest = rng.choice(nj, size=n - forced.size, p=size / size.sum())
    journal_of = np.concatenate((forced, rest))
    lo, hi = cfg.year_range
    years = rng.integers(lo, hi + 1, size=n)
    type_names = list(cfg.doc_type_mix)
    types = rng.choice(len(type_names), size=n, p=[cfg.doc_type_mix[t] for t in type_names])
    # canonical order: by year, ties random; a paper can only cite earlier positions
    order = np.lexsort((rng.random(n), years))
    journal_of, years, types = journal_of[order], years[order], types[order]
    tier_idx = tier_of_journal[journal_of]
    fields = np.array([tiers[t].field for t in tier_idx])

    if cfg.citation_model == "powerlaw":
        fitness = 1.0 + rng.pareto(cfg.powerlaw_alpha - 1.0, size=n)
    else:
        mu = np.array([tiers[t].fitness_mu for t in tier_idx])
        sigma = np.array([tiers[t].fitness_sigma for t in tier_idx])
        fitness = rng.lognormal(mu, sigma)
        hot_p = np.array([tiers[t].hot_prob for t in tier_idx])
        boost = np.array([tiers[t].hot_boost for t in tier_idx])
        fitness = np.where(rng.random(n) < hot_p, fitness * boost, fitness)
    fitness = fitness * np.array([_DOC_FITNESS.get(type_names[t], 1.0) for t in types])

    # declared reference counts and in-corpus draw counts
    mean_refs = np.array([tiers[t].mean_refs or cfg.mean_refs for t in tier_idx])
    m = 1 + rng.poisson(mean_refs - 1.0)
    k_in = rng.binomial(m, cfg.coverage)
    k_out = rng.binomial(m - k_in, cfg.unresolved_rate)
    bare = rng.random(n) < cfg.bare_rate
    undeclared = (rng.random(n) < cfg.undeclared_rate) & ~bare
    k_in[bare] = 0
    k_out[bare] = 0
    n_bare_edges = rng.integers(1, 4, size=n)

    citer = np.repeat(np.arange(n), k_in)
    local = rng.random(citer.size) < cfg.field_locality
    u = rng.random(citer.size)
    target = np.full(citer.size, -1, dtype=np.int64)
    pools = [(np.arange(n), ~local)] + [(np.flatnonzero(fields == f), local & (fields[citer] == f)) for f in sorted(set(fields.tolist()))]
    for pool, sel in pools:
        if not sel.any() or pool.size == 0:
            continue
        cum = np.cumsum(fitness[pool])
        bound = np.searchsorted(pool, citer[sel], side="left")
        ok = bound > 0
        draw = np.full(bound.size, -1, dtype=np.int64)
        limit = cum[np.maximum(bound - 1, 0)]
        pick = np.searchsorted(cum, u[sel] * limit, side="right")
        draw[ok] = pool[np.minimum(pick[ok], bound[ok] - 1)]
        target[sel] = draw
    # local draws with no earlier same-field paper fall back to the global pool
    miss = (target < 0) & local & (citer > 0)
    if miss.any():
        cum = np.cumsum(fitness)
        pick = np.searchsorted(cum, u[miss] * cum[citer[miss] - 1], side="right")
        target[miss] = np.minimum(pick, citer[miss] - 1)

    self_cite = rng.random(n) < cfg.self_cite_rate
    as_doi = rng.random(citer.size) < cfg.doi_ref_rate
    doi_style = rng.integers(0, 3, size=citer.size)
    has_doi = rng.random(n) < 0.9
    bare_targets = rng.random((n, 3))

    ids = [f"P{i:07d}" for i in range(n)]
    dois = [f"10.5555/synth.{cfg.seed}.{i}" if has_doi[i] else None for i in range(n)]
    refs: list[list[str]] = [[] for _ in range(n)]
    for c, t, d, style in zip(citer.tolist(), target.tolist(), as_doi.tolist(), doi_style.tolist()):
        if t < 0:
            continue
        if d and dois[t] is not None:
            doi = dois[t]
            refs[c].append(doi if style == 0 else doi.upper() if style == 1 else "https://doi.org/" + doi)
        else:
            refs[c].append(ids[t])

    papers = []
    edges = []
    for i in range(n):
        r = refs[i]
        r.extend(f"unresolved:{cfg.seed}:{i}:{j}" for j in range(int(k_out[i])))
        if self_cite[i] and not bare[i] and len(set(r)) < m[i]:
            r.append(ids[i])
        if bare[i]:
            if i > 0:
                for j in sorted({int(x * i) for x in bare_targets[i, : n_bare_edges[i]]}):
                    edges.append({"citing": ids[i], "cited": ids[j]})
            else:
                # nothing older to cite: keep a declared count so the paper is not bare
                undeclared[i] = False
                bare[i] = False
        papers.append(
            {
                "id": ids[i],
                "doi": dois[i],
                "year": int(years[i]),
                "doc_type": type_names[types[i]],
                "journal_id": journals[journal_of[i]]["id"],
                "references": r,
                "ref_count": None if (undeclared[i] and r) or bare[i] else int(m[i]),
            }
        )

    subjects = []
    for k, rec in enumerate(journals):
        f = tiers[tier_of_journal[k]].field
        extra = {int(rng.integers(0, cfg.n_fields))} if rng.random() < 0.2 else set()
        for scheme, prefix in SCHEME_PREFIX.items():
            for fld in sorted({f} | extra):
                subjects.append(
                    {
                        "journal_key": rec["issn"][0],
                        "scheme": scheme,
                        "subject_id": f"{prefix}{fld:03d}",
                        "subject_label": f"Field {fld}",
                    }
                )
    return SyntheticCorpus(cfg, papers, journals, edges, subjects, journal_tier)
