"""Built-in oracle-equivalence check used by ``impactum selftest``."""

from __future__ import annotations

import math
from typing import Any

from .graph import build_graph
from .indicators import IndicatorEngine
from .oracle import Oracle
from .stats import spearman, wilcoxon_signed_rank
from .synth import PLANTED_TIERS, GeneratorConfig, generate

REL_TOL = 1e-9


def _close(a: float | None, b: float | None) -> bool:
    if a is None or b is None:
        return a is None and b is None
    return math.isclose(a, b, rel_tol=REL_TOL, abs_tol=0.0) or a == b


def run_selftest(seed: int = 7, n_papers: int = 3000) -> dict[str, Any]:
    failures: list[str] = []
    checks = 0
    for model, tiers in (("lognormal", ()), ("planted", PLANTED_TIERS)):
        cfg = GeneratorConfig(seed=seed, n_papers=n_papers, n_journals=30, citation_model=model, tiers=tiers)
        corpus = generate(cfg)
        view = corpus.to_view()
        graph, stats = build_graph(view)
        if not stats.reconciles():
            failures.append(f"{model}: resolution counts do not reconcile")
        engine = IndicatorEngine(graph)
        oracle = Oracle(corpus.papers, corpus.journals, corpus.edges)
        lo, hi = cfg.year_range
        for year in range(lo + 3, hi + 1):
            expected = oracle.table(year)
            for row in engine.table(year):
                want = expected[row.journal_id]
                checks += 1
                if row.i3 != want.i3:
                    failures.append(f"{model} {year} {row.journal_id}: i3 {row.i3} != {want.i3}")
                for name in ("i3_n", "jif", "citescore"):
                    if not _close(getattr(row, name), getattr(want, name)):
                        failures.append(f"{model} {year} {row.journal_id}: {name} mismatch")
    # fixed kernel values
    if not math.isclose(spearman([1, 2, 3, 4, 5], [2, 1, 4, 3, 5]), 0.8, abs_tol=1e-12):
        failures.append("spearman reference value")
    if wilcoxon_signed_rank([1, 2, 3, 4, 5]).p_value != 0.0625:
        failures.append("wilcoxon reference value")
    return {"passed": not failures, "journal_year_checks": checks, "failures": failures[:20]}
