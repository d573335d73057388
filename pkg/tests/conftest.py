from __future__ import annotations

from collections.abc import Iterable, Mapping
from typing import Any

import pytest

from impactum.corpus import Corpus, CorpusView
from impactum.synth import GeneratorConfig, SyntheticCorpus, generate


def paper(pid: str, year: int, refs: Iterable[str] = (), *, journal: str | None = "J1",
          doc_type: str = "research_article", ref_count: int | None = None, doi: str | None = None) -> dict[str, Any]:
    return {
        "id": pid,
        "doi": doi,
        "year": year,
        "doc_type": doc_type,
        "journal_id": journal,
        "references": list(refs),
        "ref_count": ref_count,
    }


def journal(jid: str, issn: str | None = None, *, title: str | None = None, eissn: str | None = None,
            publisher: str | None = None) -> dict[str, Any]:
    return {
        "id": jid,
        "title": title if title is not None else f"Journal {jid}",
        "issn": [issn] if issn else [],
        "eissn": [eissn] if eissn else [],
        "publisher_id": publisher,
        "publisher_name": publisher,
    }


def make_view(papers: Iterable[Mapping[str, Any]], journals: Iterable[Mapping[str, Any]] = (),
              edges: Iterable[Mapping[str, str]] = ()) -> CorpusView:
    c = Corpus()
    c.ingest_journals(list(journals))
    c.ingest_papers(list(papers))
    c.ingest_edges(list(edges))
    return c.seal()


@pytest.fixture(scope="session")
def small_synth() -> SyntheticCorpus:
    return generate(GeneratorConfig(seed=11, n_papers=1500, n_journals=25))


# one line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter: Any) -> None:
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
