"""Ingestion, validation and storage of papers, journals and subject assignments.

Records are pushed into a :class:`Corpus` through the ``ingest_*`` methods,
each of which returns an :class:`IngestReport`. Once ingestion is finished,
:meth:`Corpus.seal` hands out a read-only :class:`CorpusView` that the graph
and indicator stages consume.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import logging
import re
from collections import Counter
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Any

logger = logging.getLogger(__name__)

MAX_SAMPLE_ERRORS = 20


class CorpusError(ValueError):
    """Raised for unusable ingest configuration (not for bad records)."""


class DocType(str, enum.Enum):
    RESEARCH_ARTICLE = "research_article"
    REVIEW_ARTICLE = "review_article"
    CONFERENCE_PAPER = "conference_paper"
    CASE_REPORT = "case_report"
    CLINICAL_TRIAL = "clinical_trial"
    EDITORIAL = "editorial"
    LETTER = "letter"
    BOOK_CHAPTER = "book_chapter"
    OTHER = "other"


class Scheme(str, enum.Enum):
    SCILIT = "scilit"
    SCOPUS_ASJC = "scopus_asjc"
    WOS_CATEGORY = "wos_category"


_DOI_PREFIXES = ("https://doi.org/", "http://doi.org/", "https://dx.doi.org/", "http://dx.doi.org/", "doi:")


def normalize_doi(raw: str | None) -> str | None:
    """Lowercase a DOI and strip any resolver prefix; ``None`` for blanks."""
    if raw is None:
        return None
    doi = raw.strip().lower()
    if doi.startswith(_DOI_PREFIXES):
        for prefix in _DOI_PREFIXES:
            if doi.startswith(prefix):
                doi = doi[len(prefix) :].strip()
                break
    return doi or None


def issn_check_digit(first7: str) -> str:
    total = sum(int(d) * w for d, w in zip(first7, range(8, 1, -1)))
    check = (11 - total % 11) % 11
    return "X" if check == 10 else str(check)


def normalize_issn(raw: str | None) -> str | None:
    """Return the 8-character hyphen-free ISSN, or ``None`` if it fails mod-11 validation."""
    if not raw:
        return None
    s = raw.strip().replace("-", "").replace(" ", "").upper()
    if len(s) != 8 or not s[:7].isdigit() or not (s[7].isdigit() or s[7] == "X"):
        return None
    if issn_check_digit(s[:7]) != s[7]:
        return None
    return s


@dataclass(frozen=True, slots=True)
class PaperRecord:
    paper_id: str
    doi: str | None
    year: int
    doc_type: DocType
    journal_id: str | None
    references: tuple[str, ...]
    declared_reference_count: int | None = None


@dataclass(frozen=True, slots=True)
class JournalRecord:
    journal_id: str
    title: str
    issn: tuple[str, ...] = ()
    eissn: tuple[str, ...] = ()
    publisher_id: str | None = None
    publisher_name: str | None = None


@dataclass(frozen=True, slots=True)
class SubjectAssignment:
    scheme: Scheme
    subject_id: str
    subject_label: str
    journal_key: str
    journal_id: str


@dataclass
class IngestReport:
    records_read: int = 0
    records_accepted: int = 0
    duplicates_dropped: int = 0
    conflicts: int = 0
    malformed: int = 0
    warnings: Counter = field(default_factory=Counter)
    sample_errors: list[tuple[int, str]] = field(default_factory=list)

    def _error(self, line: int, reason: str) -> None:
        if len(self.sample_errors) < MAX_SAMPLE_ERRORS:
            self.sample_errors.append((line, reason))

    def reconciles(self) -> bool:
        return self.records_read == (
            self.records_accepted + self.duplicates_dropped + self.conflicts + self.malformed
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "records_read": self.records_read,
            "records_accepted": self.records_accepted,
            "duplicates_dropped": self.duplicates_dropped,
            "conflicts": self.conflicts,
            "malformed": self.malformed,
            "warnings": dict(sorted(self.warnings.items())),
            "sample_errors": [list(e) for e in self.sample_errors],
        }


@dataclass(frozen=True)
class CorpusConfig:
    min_year: int = 1900
    max_year: int = 2100


@dataclass(frozen=True)
class ValidationReport:
    dangling_journal: int
    empty_reference_papers: int
    orphan_subjects: int

    @property
    def clean(self) -> bool:
        return not (self.dangling_journal or self.empty_reference_papers or self.orphan_subjects)


class _Malformed(Exception):
    pass


def _as_str(value: Any, name: str, *, optional: bool = False) -> str | None:
    if value is None:
        if optional:
            return None
        raise _Malformed(f"missing {name}")
    if not isinstance(value, str) or not value.strip():
        if optional and value == "":
            return None
        raise _Malformed(f"bad {name}")
    return value.strip()


def _iter_json_lines(source: Iterable[str | Mapping[str, Any]]) -> Iterator[tuple[int, Any]]:
    for lineno, line in enumerate(source, start=1):
        if isinstance(line, Mapping):
            yield lineno, line
            continue
        if not line.strip():
            continue
        try:
            yield lineno, json.loads(line)
        except json.JSONDecodeError as exc:
            yield lineno, _Malformed(f"invalid json: {exc.msg}")


class Corpus:
    """Mutable record store. Single writer; call :meth:`seal` before analysis."""

    def __init__(self, config: CorpusConfig | None = None) -> None:
        self.config = config or CorpusConfig()
        self._papers: dict[str, PaperRecord] = {}
        self._doi_index: dict[str, str] = {}
        self._journals: dict[str, JournalRecord] = {}
        self._issn_index: dict[str, str] = {}
        self._eissn_index: dict[str, str] = {}
        self._title_index: dict[str, list[str]] = {}
        self._subjects: dict[tuple[Scheme, str, str], SubjectAssignment] = {}
        self._extra_edges: dict[tuple[str, str], None] = {}
        self._sealed = False

    def _check_open(self) -> None:
        if self._sealed:
            raise CorpusError("corpus is sealed")

    # papers -----------------------------------------------------------------

    def _parse_paper(self, obj: Any) -> tuple[PaperRecord, bool]:
        if isinstance(obj, _Malformed):
            raise obj
        if not isinstance(obj, Mapping):
            raise _Malformed("record is not an object")
        paper_id = _as_str(obj.get("id"), "id")
        doi = normalize_doi(_as_str(obj.get("doi"), "doi", optional=True))
        year = obj.get("year")
        if isinstance(year, bool) or not isinstance(year, int):
            raise _Malformed("year must be an integer")
        if not self.config.min_year <= year <= self.config.max_year:
            raise _Malformed(f"year {year} outside bounds")
        raw_type = obj.get("doc_type")
        unknown_type = False
        try:
            doc_type = DocType(raw_type)
        except ValueError:
            doc_type = DocType.OTHER
            unknown_type = True
        journal_id = _as_str(obj.get("journal_id"), "journal_id", optional=True)
        refs = obj.get("references") or []
        if not isinstance(refs, list) or not set(map(type, refs)) <= {str} or "" in refs:
            raise _Malformed("references must be a list of non-empty strings")
        ref_count = obj.get("ref_count")
        if ref_count is not None:
            if isinstance(ref_count, bool) or not isinstance(ref_count, int) or ref_count < 0:
                raise _Malformed("ref_count must be a non-negative integer")
            if ref_count < len(set(refs)):
                raise _Malformed("ref_count below number of listed references")
        record = PaperRecord(paper_id, doi, year, doc_type, journal_id, tuple(refs), ref_count)
        return record, unknown_type

    def ingest_papers(self, source: Iterable[str | Mapping[str, Any]]) -> IngestReport:
        """Ingest ``papers.jsonl`` lines (or already-decoded dicts).

        Duplicate ids or DOIs keep the first record. Bad lines are counted and
        skipped; they never abort the stream.
        """
        self._check_open()
        report = IngestReport()
        for lineno, obj in _iter_json_lines(source):
            report.records_read += 1
            try:
                record, unknown_type = self._parse_paper(obj)
            except _Malformed as exc:
                report.malformed += 1
                report._error(lineno, str(exc))
                continue
            if record.paper_id in self._papers or (
                record.doi is not None and record.doi in self._doi_index
            ):
                report.duplicates_dropped += 1
                continue
            self._papers[record.paper_id] = record
            if record.doi is not None:
                self._doi_index[record.doi] = record.paper_id
            if unknown_type:
                report.warnings["unknown_doc_type"] += 1
            report.records_accepted += 1
        if report.warnings:
            logger.warning("paper ingest warnings: %s", dict(report.warnings))
        return report

    # journals ---------------------------------------------------------------

    def ingest_journals(self, source: Iterable[str | Mapping[str, Any]]) -> IngestReport:
        """Ingest ``journals.jsonl``. A later record claiming a known ISSN is a conflict."""
        self._check_open()
        report = IngestReport()
        for lineno, obj in _iter_json_lines(source):
            report.records_read += 1
            try:
                if isinstance(obj, _Malformed):
                    raise obj
                if not isinstance(obj, Mapping):
                    raise _Malformed("record is not an object")
                journal_id = _as_str(obj.get("id"), "id")
                title = (obj.get("title") or "").strip() if isinstance(obj.get("title"), str) else ""
                keys: dict[str, list[str]] = {}
                for name in ("issn", "eissn"):
                    raw = obj.get(name) or []
                    if isinstance(raw, str):
                        raw = [raw]
                    if not isinstance(raw, list):
                        raise _Malformed(f"{name} must be a list")
                    good = []
                    for value in raw:
                        norm = normalize_issn(value) if isinstance(value, str) else None
                        if norm is None:
                            report.warnings[f"invalid_{name}"] += 1
                        elif norm not in good:
                            good.append(norm)
                    keys[name] = good
                if not (keys["issn"] or keys["eissn"] or title):
                    raise _Malformed("no usable issn, eissn or title")
            except _Malformed as exc:
                report.malformed += 1
                report._error(lineno, str(exc))
                continue
            if journal_id in self._journals:
                report.duplicates_dropped += 1
                continue
            claimed = [k for k in keys["issn"] + keys["eissn"] if k in self._issn_index or k in self._eissn_index]
            if claimed:
                report.conflicts += 1
                report._error(lineno, f"issn {claimed[0]} already claimed")
                continue
            record = JournalRecord(
                journal_id,
                title,
                tuple(keys["issn"]),
                tuple(keys["eissn"]),
                _as_str(obj.get("publisher_id"), "publisher_id", optional=True),
                _as_str(obj.get("publisher_name"), "publisher_name", optional=True),
            )
            self._journals[journal_id] = record
            for k in record.issn:
                self._issn_index[k] = journal_id
            for k in record.eissn:
                self._eissn_index[k] = journal_id
            if title:
                self._title_index.setdefault(normalize_title(title), []).append(journal_id)
            report.records_accepted += 1
        return report

    def resolve_journal_key(self, key: str) -> str | None:
        """Resolve an ISSN, then eISSN, then a raw journal id to a journal id."""
        issn = normalize_issn(key)
        if issn is not None:
            if issn in self._issn_index:
                return self._issn_index[issn]
            if issn in self._eissn_index:
                return self._eissn_index[issn]
        if key in self._journals:
            return key
        return None

    # subjects ---------------------------------------------------------------

    def ingest_subject_assignments(
        self, source: Iterable[Mapping[str, str]], scheme: str | Scheme
    ) -> IngestReport:
        """Attach subject rows of one classification scheme to known journals.

        ``source`` yields mappings with ``journal_key``, ``subject_id`` and
        ``subject_label``; a ``scheme`` column, if present, must agree.
        """
        self._check_open()
        try:
            scheme = Scheme(scheme)
        except ValueError:
            raise CorpusError(f"unknown subject scheme {scheme!r}") from None
        report = IngestReport()
        for lineno, row in enumerate(source, start=1):
            report.records_read += 1
            key = (row.get("journal_key") or "").strip()
            subject_id = (row.get("subject_id") or "").strip()
            label = (row.get("subject_label") or "").strip()
            row_scheme = (row.get("scheme") or scheme.value).strip()
            if row_scheme != scheme.value:
                report.malformed += 1
                report._error(lineno, f"row scheme {row_scheme!r} does not match {scheme.value}")
                continue
            if not key or not subject_id:
                report.malformed += 1
                report._error(lineno, "missing journal_key or subject_id")
                continue
            journal_id = self.resolve_journal_key(key)
            if journal_id is None:
                report.malformed += 1
                report._error(lineno, f"unresolvable journal key {key}")
                continue
            triple = (scheme, subject_id, journal_id)
            if triple in self._subjects:
                report.duplicates_dropped += 1
                continue
            self._subjects[triple] = SubjectAssignment(scheme, subject_id, label, key, journal_id)
            report.records_accepted += 1
        return report

    def ingest_subjects_csv(self, text: Iterable[str]) -> dict[str, IngestReport]:
        """Read ``subjects.csv`` and ingest it scheme by scheme.

        Rows naming an unknown scheme land in the ``"unknown"`` report as malformed.
        """
        rows = list(csv.DictReader(text))
        by_scheme: dict[str, list[dict[str, str]]] = {}
        unknown = IngestReport()
        for lineno, row in enumerate(rows, start=2):
            name = (row.get("scheme") or "").strip()
            if name not in Scheme._value2member_map_:
                unknown.records_read += 1
                unknown.malformed += 1
                unknown._error(lineno, f"unknown scheme {name!r}")
                continue
            by_scheme.setdefault(name, []).append(row)
        reports = {name: self.ingest_subject_assignments(rs, name) for name, rs in sorted(by_scheme.items())}
        if unknown.records_read:
            reports["unknown"] = unknown
        return reports

    # supplementary edges ----------------------------------------------------

    def ingest_edges(self, source: Iterable[str | Mapping[str, Any]]) -> IngestReport:
        """Ingest ``edges.jsonl`` supplement lines ``{"citing": ..., "cited": ...}``."""
        self._check_open()
        report = IngestReport()
        for lineno, obj in _iter_json_lines(source):
            report.records_read += 1
            try:
                if isinstance(obj, _Malformed):
                    raise obj
                if not isinstance(obj, Mapping):
                    raise _Malformed("record is not an object")
                pair = (_as_str(obj.get("citing"), "citing"), _as_str(obj.get("cited"), "cited"))
            except _Malformed as exc:
                report.malformed += 1
                report._error(lineno, str(exc))
                continue
            if pair in self._extra_edges:
                report.duplicates_dropped += 1
                continue
            self._extra_edges[pair] = None
            report.records_accepted += 1
        return report

    def seal(self) -> CorpusView:
        self._sealed = True
        return CorpusView(self)


def normalize_title(title: str) -> str:
    """Case-fold, drop punctuation and collapse whitespace."""
    cleaned = re.sub(r"[^\w\s]", " ", title.casefold())
    return " ".join(cleaned.replace("_", " ").split())


class CorpusView:
    """Read-only view of a sealed corpus. Iteration orders are sorted by id."""

    def __init__(self, corpus: Corpus) -> None:
        self._c = corpus
        self.papers: Mapping[str, PaperRecord] = MappingProxyType(
            {k: corpus._papers[k] for k in sorted(corpus._papers)}
        )
        self.journals: Mapping[str, JournalRecord] = MappingProxyType(
            {k: corpus._journals[k] for k in sorted(corpus._journals)}
        )
        self.doi_index: Mapping[str, str] = MappingProxyType(corpus._doi_index)
        self.subjects: tuple[SubjectAssignment, ...] = tuple(
            corpus._subjects[k] for k in sorted(corpus._subjects, key=lambda t: (t[0].value, t[1], t[2]))
        )
        self.extra_edges: tuple[tuple[str, str], ...] = tuple(sorted(corpus._extra_edges))

    def resolve_journal_key(self, key: str) -> str | None:
        return self._c.resolve_journal_key(key)

    def journals_by_title(self, title: str) -> list[str]:
        return sorted(self._c._title_index.get(normalize_title(title), []))

    def resolve_reference(self, ref: str) -> str | None:
        if ref in self.papers:
            return ref
        doi = normalize_doi(ref)
        return self.doi_index.get(doi) if doi else None


def validate_corpus(view: CorpusView) -> ValidationReport:
    """Count dangling journal links, bare papers and subjects whose journal has no papers."""
    dangling = 0
    empty = 0
    journals_with_papers: set[str] = set()
    has_extra = {citing for citing, _ in view.extra_edges}
    for paper in view.papers.values():
        if paper.journal_id is not None:
            if paper.journal_id in view.journals:
                journals_with_papers.add(paper.journal_id)
            else:
                dangling += 1
        if not paper.references and paper.declared_reference_count is None and paper.paper_id not in has_extra:
            empty += 1
    orphans = sum(1 for s in view.subjects if s.journal_id not in journals_with_papers)
    return ValidationReport(dangling, empty, orphans)


def load_corpus(
    papers: Path | None,
    journals: Path | None = None,
    subjects: Path | None = None,
    edges: Path | None = None,
    config: CorpusConfig | None = None,
) -> tuple[CorpusView, dict[str, Any]]:
    """Ingest files from disk and return the sealed view plus per-file reports."""
    corpus = Corpus(config)
    reports: dict[str, Any] = {}
    if journals is not None:
        with journals.open(encoding="utf-8") as fh:
            reports["journals"] = corpus.ingest_journals(fh).to_dict()
    if papers is not None:
        with papers.open(encoding="utf-8") as fh:
            reports["papers"] = corpus.ingest_papers(fh).to_dict()
    if edges is not None:
        with edges.open(encoding="utf-8") as fh:
            reports["edges"] = corpus.ingest_edges(fh).to_dict()
    if subjects is not None:
        with subjects.open(encoding="utf-8", newline="") as fh:
            reports["subjects"] = {k: v.to_dict() for k, v in corpus.ingest_subjects_csv(fh).items()}
    return corpus.seal(), reports


def dump_corpus(view: CorpusView, out: Path) -> None:
    """Write the normalized corpus back out in the ingest formats."""
    out.mkdir(parents=True, exist_ok=True)
    with (out / "papers.jsonl").open("w", encoding="utf-8") as fh:
        for p in view.papers.values():
            fh.write(json.dumps(paper_to_json(p), sort_keys=True) + "\n")
    with (out / "journals.jsonl").open("w", encoding="utf-8") as fh:
        for j in view.journals.values():
            fh.write(json.dumps(journal_to_json(j), sort_keys=True) + "\n")
    with (out / "edges.jsonl").open("w", encoding="utf-8") as fh:
        for citing, cited in view.extra_edges:
            fh.write(json.dumps({"cited": cited, "citing": citing}, sort_keys=True) + "\n")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["journal_key", "scheme", "subject_id", "subject_label"])
    for s in view.subjects:
        writer.writerow([s.journal_key, s.scheme.value, s.subject_id, s.subject_label])
    (out / "subjects.csv").write_text(buf.getvalue(), encoding="utf-8")


def paper_to_json(p: PaperRecord) -> dict[str, Any]:
    return {
        "id": p.paper_id,
        "doi": p.doi,
        "year": p.year,
        "doc_type": p.doc_type.value,
        "journal_id": p.journal_id,
        "references": list(p.references),
        "ref_count": p.declared_reference_count,
    }


def journal_to_json(j: JournalRecord) -> dict[str, Any]:
    return {
        "id": j.journal_id,
        "title": j.title,
        "issn": list(j.issn),
        "eissn": list(j.eissn),
        "publisher_id": j.publisher_id,
        "publisher_name": j.publisher_name,
    }
