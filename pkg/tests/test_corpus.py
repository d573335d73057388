from __future__ import annotations

import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from impactum.corpus import (
    Corpus,
    CorpusError,
    DocType,
    Scheme,
    dump_corpus,
    issn_check_digit,
    load_corpus,
    normalize_doi,
    normalize_issn,
    normalize_title,
    validate_corpus,
)

from .conftest import journal, make_view, paper


def lines(records):
    return [json.dumps(r) for r in records]


# normalization ------------------------------------------------------------


@pytest.mark.parametrize(
    "raw, expected",
    [
        ("10.1000/ABC", "10.1000/abc"),
        ("https://doi.org/10.1000/abc", "10.1000/abc"),
        ("http://dx.doi.org/10.1000/abc", "10.1000/abc"),
        ("doi: 10.1000/abc", "10.1000/abc"),
        ("  ", None),
        (None, None),
    ],
)
def test_normalize_doi(raw, expected):
    assert normalize_doi(raw) == expected


def test_issn_normalization():
    assert normalize_issn("0036-8075") == "00368075"
    assert normalize_issn("0036-8076") is None  # bad check digit
    assert normalize_issn("2434-561x") == "2434561X"
    assert normalize_issn("12345") is None


@given(st.text(alphabet="0123456789", min_size=7, max_size=7))
def test_generated_issns_validate(body):
    full = body + issn_check_digit(body)
    assert normalize_issn(f"{full[:4]}-{full[4:]}") == full


def test_normalize_title():
    assert normalize_title("  The Journal of  Data-Science! ") == "the journal of data science"


# papers -------------------------------------------------------------------


def test_clean_papers():
    c = Corpus()
    r = c.ingest_papers(lines([paper("A", 2020, doi="10.1/a"), paper("B", 2020, doi="10.1/b"), paper("C", 2021)]))
    assert (r.records_accepted, r.malformed) == (3, 0)
    assert r.reconciles()


def test_duplicate_doi_keep_first():
    c = Corpus()
    r = c.ingest_papers(lines([paper("A", 2020, doi="10.1/x"), paper("B", 2021, doi="https://doi.org/10.1/X")]))
    assert (r.records_accepted, r.duplicates_dropped) == (1, 1)
    view = c.seal()
    assert list(view.papers) == ["A"]
    assert view.resolve_reference("10.1/X") == "A"


def test_year_out_of_bounds_is_malformed():
    c = Corpus()
    r = c.ingest_papers(lines([paper("A", 2020), paper("B", 99999), paper("C", 2021)]))
    assert (r.records_accepted, r.malformed) == (2, 1)
    assert r.sample_errors[0][0] == 2


def test_bad_lines_never_abort():
    c = Corpus()
    src = ["{not json", json.dumps([1, 2]), json.dumps(paper("A", 2020)), json.dumps({"id": "B"})]
    r = c.ingest_papers(src)
    assert r.records_accepted == 1
    assert r.malformed == 3
    assert r.reconciles()


def test_unknown_doc_type_maps_to_other():
    c = Corpus()
    r = c.ingest_papers(lines([paper("A", 2020, doc_type="preprint")]))
    assert r.records_accepted == 1
    assert r.warnings["unknown_doc_type"] == 1
    assert c.seal().papers["A"].doc_type is DocType.OTHER


def test_ref_count_below_listed_is_malformed():
    c = Corpus()
    r = c.ingest_papers(lines([paper("A", 2020, ["B", "C"], ref_count=1)]))
    assert r.malformed == 1


def test_ingest_idempotent():
    recs = [paper("A", 2020, doi="10.1/a"), paper("B", 2021, ["A"])]
    once, twice = Corpus(), Corpus()
    once.ingest_papers(lines(recs))
    twice.ingest_papers(lines(recs))
    second = twice.ingest_papers(lines(recs))
    assert second.duplicates_dropped == 2 and second.records_accepted == 0
    assert dict(once.seal().papers) == dict(twice.seal().papers)


@given(st.permutations([paper(f"P{i}", 2000 + i, doi=f"10.9/{i}") for i in range(6)]))
def test_ingest_order_irrelevant(perm):
    a, b = Corpus(), Corpus()
    a.ingest_papers(lines(sorted(perm, key=lambda p: p["id"])))
    b.ingest_papers(lines(perm))
    assert list(a.seal().papers.items()) == list(b.seal().papers.items())


def test_sealed_corpus_rejects_ingest():
    c = Corpus()
    c.seal()
    with pytest.raises(CorpusError):
        c.ingest_papers([])


# journals -----------------------------------------------------------------


def test_journal_issn_index():
    c = Corpus()
    r = c.ingest_journals(lines([journal("J1", "0036-8075")]))
    assert r.records_accepted == 1
    assert c.resolve_journal_key("00368075") == "J1"
    assert c.seal().journals["J1"].issn == ("00368075",)


def test_issn_conflict():
    c = Corpus()
    r = c.ingest_journals(lines([journal("J1", "1234-5679"), journal("J2", "1234-5679")]))
    assert (r.records_accepted, r.conflicts) == (1, 1)
    assert r.reconciles()


def test_title_only_journal():
    c = Corpus()
    r = c.ingest_journals(lines([{"id": "J9", "title": "Annals of Nothing", "issn": [], "eissn": []}]))
    assert r.records_accepted == 1
    assert c.seal().journals_by_title("annals of nothing") == ["J9"]


def test_invalid_issn_dropped_record_kept():
    c = Corpus()
    r = c.ingest_journals(lines([{"id": "J1", "title": "T", "issn": ["0036-8076"], "eissn": ["0036-8075"]}]))
    assert r.records_accepted == 1
    assert r.warnings["invalid_issn"] == 1
    assert c.seal().journals["J1"].issn == ()


def test_journal_without_key_is_malformed():
    c = Corpus()
    r = c.ingest_journals(lines([{"id": "J1", "title": "", "issn": ["bogus"]}]))
    assert r.malformed == 1


# subjects -----------------------------------------------------------------


def _subject_corpus():
    c = Corpus()
    c.ingest_journals([journal("J1", "0036-8075")])
    return c


def test_subject_assignment_resolves_by_issn():
    c = _subject_corpus()
    row = {"journal_key": "0036-8075", "subject_id": "2002", "subject_label": "Economics and Econometrics"}
    r = c.ingest_subject_assignments([row], "scopus_asjc")
    assert r.records_accepted == 1
    (a,) = c.seal().subjects
    assert (a.scheme, a.subject_id, a.journal_id) == (Scheme.SCOPUS_ASJC, "2002", "J1")


def test_subject_duplicates_and_unknown_key():
    c = _subject_corpus()
    row = {"journal_key": "00368075", "subject_id": "2002", "subject_label": "Econ"}
    unknown = {"journal_key": "1234-5679", "subject_id": "2002", "subject_label": "Econ"}
    r = c.ingest_subject_assignments([row, row, unknown], Scheme.SCOPUS_ASJC)
    assert (r.records_accepted, r.duplicates_dropped, r.malformed) == (1, 1, 1)


def test_unknown_scheme_is_hard_error():
    c = _subject_corpus()

    def stream():
        raise AssertionError("stream must not be read")
        yield  # pragma: no cover

    with pytest.raises(CorpusError):
        c.ingest_subject_assignments(stream(), "mesh")


def test_subjects_csv_multi_scheme():
    c = _subject_corpus()
    text = [
        "journal_key,scheme,subject_id,subject_label\n",
        '0036-8075,scilit,S1,"Economics, general"\n',
        "0036-8075,wos_category,W1,Economics\n",
        "0036-8075,mesh,M1,Nope\n",
    ]
    reports = c.ingest_subjects_csv(text)
    assert reports["scilit"].records_accepted == 1
    assert reports["wos_category"].records_accepted == 1
    assert reports["unknown"].malformed == 1
    assert c.seal().subjects[0].subject_label == "Economics, general"


# validation ---------------------------------------------------------------


def test_validate_clean():
    view = make_view([paper("A", 2020, ref_count=0), paper("B", 2021, ["A"])], [journal("J1", "0036-8075")])
    assert validate_corpus(view).clean


def test_validate_dangling_and_empty():
    view = make_view([paper("A", 2020, journal="NOPE", ref_count=3), paper("B", 2021)], [journal("J1", "0036-8075")])
    rep = validate_corpus(view)
    assert rep.dangling_journal == 1
    assert rep.empty_reference_papers == 1
    assert "A" in view.papers  # dangling papers are retained


def test_validate_orphan_subject():
    c = Corpus()
    c.ingest_journals([journal("J1", "0036-8075"), journal("J2", "1234-5679")])
    c.ingest_papers([paper("A", 2020, ref_count=0)])
    c.ingest_subject_assignments([{"journal_key": "1234-5679", "subject_id": "x", "subject_label": ""}], "scilit")
    assert validate_corpus(c.seal()).orphan_subjects == 1


def test_dump_and_reload_round_trip(tmp_path, small_synth):
    view = small_synth.to_view()
    dump_corpus(view, tmp_path)
    again, reports = load_corpus(
        tmp_path / "papers.jsonl", tmp_path / "journals.jsonl", tmp_path / "subjects.csv", tmp_path / "edges.jsonl"
    )
    assert dict(again.papers) == dict(view.papers)
    assert dict(again.journals) == dict(view.journals)
    assert again.subjects == view.subjects
    assert again.extra_edges == view.extra_edges
    assert reports["papers"]["malformed"] == 0
