"""Command-line entry point: ``impactum <subcommand> [options]``.

Every subcommand stages its outputs in a scratch directory inside ``--out``
and moves them into place only after the whole run succeeded, so a failed
run leaves no partial files behind. Each run writes ``manifest_<cmd>.json``
with input hashes, the echoed configuration and library versions.

Exit codes: 0 ok, 1 usage, 2 data error, 3 internal error. Errors are
reported on stderr as one JSON line.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import platform
import shutil
import sys
import tempfile
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .compare import (
    DEFAULT_CROSSWALK_THRESHOLD,
    ComparisonError,
    IndicatorTable,
    MatchedJournalSet,
    concordance_matrix,
    descriptive_table,
    ecdf_shift,
    mapped_subject_groups,
    match_journals,
    publisher_distribution,
    quadrant_assess_normalized,
    quadrant_assess_raw,
    quartile_subject_proportions,
    rank_difference_analysis,
    subject_crosswalk,
    subject_trend,
    subjects_by_entry,
)
from .corpus import CorpusConfig, CorpusError, CorpusView, DocType, Scheme, load_corpus, validate_corpus
from .graph import DOC_TYPES, build_graph
from .indicators import IndicatorEngine, IndicatorRow
from .outputs import FORMATS, read_table, sha256_file, write_json, write_table
from .percentiles import CLASS_ORDER, DEFAULT_DOC_TYPES, DEFAULT_WEIGHTS, CohortError, validate_weights
from .synth import CITATION_MODELS, PLANTED_TIERS, GeneratorConfig, InfeasibleConfig, generate

logger = logging.getLogger("impactum")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3
THREADS_ENV = "IMPACTUM_THREADS"
TREND_INDICATORS = ("i3_n", "jif", "citescore")
CLASS_FIELDS = ("paper_id", "year", "doc_type", "frac_count", "percentile", "class")


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class SelfTestFailure(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(f"{self.prog}: {message}")


# -- argument parsing ---------------------------------------------------------


def _int_list(text: str, n: int | None = None) -> tuple[int, ...]:
    try:
        values = tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if n is not None and len(values) != n:
        raise argparse.ArgumentTypeError(f"expected {n} comma-separated integers, got {text!r}")
    return values


def _weights(text: str) -> tuple[int, int, int, int]:
    values = _int_list(text, 4)
    try:
        return validate_weights(values)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _year_pair(text: str) -> tuple[int, int]:
    y1, y2 = _int_list(text, 2)
    if y1 == y2:
        raise argparse.ArgumentTypeError("--years needs two different years")
    return (y1, y2)


def _doc_types(text: str) -> tuple[str, ...]:
    names = tuple(sorted({t.strip() for t in text.split(",") if t.strip()}))
    bad = [t for t in names if t not in DocType._value2member_map_]
    if bad or not names:
        valid = ",".join(dt.value for dt in DOC_TYPES)
        raise argparse.ArgumentTypeError(f"unknown doc types {bad}; valid: {valid}")
    return names


def _non_negative(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", type=Path, default=Path("out"), help="output directory (default: ./out)")
    common.add_argument("--format", dest="fmt", choices=FORMATS, default="csv", help="table format")
    common.add_argument("-v", "--verbose", action="store_true")

    inputs = _Parser(add_help=False)
    inputs.add_argument("--papers", type=Path, help="papers.jsonl (default: OUT/papers.jsonl)")
    inputs.add_argument("--journals", type=Path, help="journals.jsonl (default: OUT/journals.jsonl)")
    inputs.add_argument("--subjects", type=Path, help="subjects.csv (default: OUT/subjects.csv if present)")
    inputs.add_argument("--edges", type=Path, help="edges.jsonl (default: OUT/edges.jsonl if present)")

    indicators = _Parser(add_help=False)
    indicators.add_argument("--year", type=int, help="single indicator year")
    indicators.add_argument("--years", type=_year_pair, help="two indicator years Y1,Y2")
    indicators.add_argument("--weights", type=_weights, default=DEFAULT_WEIGHTS, help="I3 class weights a,b,c,d")
    indicators.add_argument(
        "--doc-types",
        type=_doc_types,
        default=tuple(sorted(t.value for t in DEFAULT_DOC_TYPES)),
        help="comma-separated doc types forming percentile cohorts",
    )
    indicators.add_argument("--i3-pub-offsets", type=_int_list, default=(3, 2), help="I3 publication years as offsets from Y")
    indicators.add_argument(
        "--i3-cite-offsets", type=_int_list, default=(3, 2, 1, 0), help="I3 citation years as offsets from Y"
    )

    parser = _Parser(prog="impactum", description="Journal impact indicators and indicator comparisons.")
    parser.add_argument("--version", action="version", version=f"impactum {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("ingest", parents=[common, inputs], help="validate input files and write ingest reports")

    p = sub.add_parser("compute", parents=[common, inputs, indicators], help="write indicators.csv")
    p.add_argument("--dump-classes", action="store_true", help="also write per-paper classes_<Y> tables")

    p = sub.add_parser("compare", parents=[common, inputs], help="compare indicator tables across sources and years")
    p.add_argument("tables", nargs="*", type=Path, help="indicator tables (default: OUT/indicators.csv)")
    p.add_argument("--years", type=_year_pair, help="years Y1,Y2 (default: the two latest years present)")
    p.add_argument("--crosswalk-threshold", type=_non_negative, default=DEFAULT_CROSSWALK_THRESHOLD)
    p.add_argument("--min-publisher-journals", type=_non_negative, default=5)

    p = sub.add_parser("report", parents=[common, inputs], help="descriptive statistics and a markdown summary")
    p.add_argument("tables", nargs="*", type=Path, help="indicator tables (default: OUT/indicators.csv)")

    p = sub.add_parser("synth", parents=[common], help="generate a seeded synthetic corpus")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-papers", type=int, default=4000)
    p.add_argument("--n-journals", type=int, default=40)
    p.add_argument("--model", choices=CITATION_MODELS, default="lognormal")
    p.add_argument("--year-range", type=lambda s: _int_list(s, 2), default=(2016, 2024), help="first,last year")

    p = sub.add_parser("selftest", parents=[common], help="check the engine against the brute-force oracle")
    p.add_argument("--seed", type=int, default=7)
    return parser


# -- run plumbing --------------------------------------------------------------


def threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw == "":
        return min(4, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def parallel_map(fn: Callable[[Any], Any], items: Sequence[Any]) -> list[Any]:
    """Map preserving input order; worker count capped by ``IMPACTUM_THREADS``."""
    n = min(threads(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


@dataclass
class Run:
    """Staged output directory plus the manifest being assembled."""

    command: str
    out: Path
    config: dict[str, Any]
    inputs: dict[str, Path] = field(default_factory=dict)
    extra: dict[str, Any] = field(default_factory=dict)
    stage: Path | None = None

    def __enter__(self) -> Run:
        self._created = not self.out.exists()
        self.out.mkdir(parents=True, exist_ok=True)
        self.stage = Path(tempfile.mkdtemp(prefix=".staging-", dir=self.out))
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        assert self.stage is not None
        try:
            if exc_type is None:
                self._write_manifest()
                for path in sorted(self.stage.iterdir()):
                    os.replace(path, self.out / path.name)
        finally:
            shutil.rmtree(self.stage, ignore_errors=True)
            if exc_type is not None and self._created and not any(self.out.iterdir()):
                self.out.rmdir()

    def _write_manifest(self) -> None:
        assert self.stage is not None
        outputs = {p.name: sha256_file(p) for p in sorted(self.stage.iterdir())}
        manifest = {
            "command": self.command,
            "config": self.config,
            "inputs": {k: {"file": p.name, "sha256": sha256_file(p)} for k, p in sorted(self.inputs.items())},
            "outputs": outputs,
            "versions": {"impactum": __version__, "numpy": np.__version__, "python": platform.python_version()},
            **self.extra,
        }
        write_json(self.stage / f"manifest_{self.command}.json", manifest)


def _input(path: Path | None, out: Path, default: str, *, required: bool) -> Path | None:
    if path is None:
        candidate = out / default
        if candidate.exists():
            return candidate
        if required:
            raise DataError(f"missing input {default}: not given and not found in {out}")
        return None
    if not path.is_file():
        raise DataError(f"missing input file {path}")
    return path


def _load(args: argparse.Namespace, *, papers_required: bool) -> tuple[CorpusView, dict[str, Any], dict[str, Path]]:
    # compare/report only need journal metadata and subjects
    need_papers = papers_required or args.papers is not None
    paths = {
        "papers": _input(args.papers, args.out, "papers.jsonl", required=True) if need_papers else None,
        "journals": _input(args.journals, args.out, "journals.jsonl", required=False),
        "subjects": _input(args.subjects, args.out, "subjects.csv", required=False),
        "edges": _input(args.edges, args.out, "edges.jsonl", required=False) if need_papers else None,
    }
    view, reports = load_corpus(paths["papers"], paths["journals"], paths["subjects"], paths["edges"], CorpusConfig())
    return view, reports, {k: v for k, v in paths.items() if v is not None}


def _years(args: argparse.Namespace) -> list[int]:
    if args.year is not None and args.years is not None:
        raise UsageError("give either --year or --years, not both")
    if args.years is not None:
        return sorted(args.years)
    if args.year is not None:
        return [args.year]
    raise UsageError("compute needs --year Y or --years Y1,Y2")


# -- subcommands ---------------------------------------------------------------


def cmd_ingest(args: argparse.Namespace) -> None:
    view, reports, paths = _load(args, papers_required=True)
    validation = validate_corpus(view)
    with Run("ingest", args.out, {"format": args.fmt}, paths) as run:
        write_json(run.stage / "ingest_report.json", reports)
        write_json(
            run.stage / "validation.json",
            {
                "clean": validation.clean,
                "dangling_journal": validation.dangling_journal,
                "empty_reference_papers": validation.empty_reference_papers,
                "orphan_subjects": validation.orphan_subjects,
                "papers": len(view.papers),
                "journals": len(view.journals),
                "subject_assignments": len(view.subjects),
                "supplement_edges": len(view.extra_edges),
            },
        )


def _class_rows(engine: IndicatorEngine, year: int) -> list[dict[str, Any]]:
    g = engine.graph
    cc = engine.classified(year)
    rows = []
    for i in np.flatnonzero(cc.member).tolist():
        rows.append(
            {
                "paper_id": g.paper_ids[i],
                "year": int(g.years[i]),
                "doc_type": DOC_TYPES[g.doc_types[i]].value,
                "frac_count": float(cc.counts[i]),
                "percentile": float(cc.percentile[i]),
                "class": CLASS_ORDER[cc.code[i]].value,
            }
        )
    return rows


def cmd_compute(args: argparse.Namespace) -> None:
    years = _years(args)
    view, _, paths = _load(args, papers_required=True)
    graph, stats = build_graph(view)
    overrides = {"i3_pub_offsets": args.i3_pub_offsets, "i3_cite_offsets": args.i3_cite_offsets}
    engine = IndicatorEngine(graph, args.weights, frozenset(args.doc_types), overrides)
    try:
        for y in years:
            engine.policy(y)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    # classification per year is the expensive part; run the years side by side
    tables = parallel_map(engine.table, years)
    rows = sorted((r for t in tables for r in t), key=lambda r: (r.journal_id, r.year))
    config = {
        "years": years,
        "weights": list(args.weights),
        "doc_types": list(args.doc_types),
        "i3_pub_offsets": list(args.i3_pub_offsets),
        "i3_cite_offsets": list(args.i3_cite_offsets),
        "format": args.fmt,
    }
    extra = {
        "resolution": {
            "references_seen": stats.references_seen,
            "edges_resolved": stats.edges_resolved,
            "unresolved": stats.unresolved,
            "self_loops_dropped": stats.self_loops_dropped,
            "duplicates_collapsed": stats.duplicates_collapsed,
        },
        "jif_asymmetry": {str(y): sorted(engine.asymmetries.get(y, [])) for y in years},
    }
    with Run("compute", args.out, config, paths, extra) as run:
        write_table(run.stage, "indicators", IndicatorRow.CSV_FIELDS, (r.to_record() for r in rows), args.fmt)
        if args.dump_classes:
            for y in years:
                write_table(run.stage, f"classes_{y}", CLASS_FIELDS, _class_rows(engine, y), args.fmt)


def _tables(args: argparse.Namespace, view: CorpusView | None) -> tuple[list[IndicatorTable], dict[str, Path]]:
    paths = list(args.tables) or [args.out / f"indicators.{args.fmt}"]
    for p in paths:
        if not p.is_file():
            raise DataError(f"missing indicator table {p}")
    names = [p.stem for p in paths]
    if len(set(names)) != len(names):
        names = [f"{p.parent.name}/{p.stem}" for p in paths]
    if len(set(names)) != len(names):
        names = [f"t{i}" for i in range(len(paths))]
    try:
        tables = [IndicatorTable.from_records(n, read_table(p), view) for n, p in zip(names, paths)]
    except (ValueError, KeyError) as exc:
        raise DataError(f"unreadable indicator table: {exc}") from None
    return tables, {f"table:{n}": p for n, p in zip(names, paths)}


def _subject_ref(ref: tuple[Scheme, str]) -> str:
    return f"{ref[0].value}:{ref[1]}"


def _fmt_p(result: Any) -> float | None:
    return None if result is None else result.p_value


def _compare_outputs(args, run: Run, matched: MatchedJournalSet, view: CorpusView | None, y1: int, y2: int) -> None:
    stage, fmt = run.stage, args.fmt
    assert stage is not None
    assignments = list(view.subjects) if view is not None else []
    years_present = set(matched.years())
    years = sorted({y1, y2} & years_present)

    write_table(
        stage,
        "matched_journals",
        ("key", "match_key", "publisher", "members"),
        (
            {
                "key": e.key,
                "match_key": e.match_key_used.value,
                "publisher": e.publisher,
                "members": ";".join(f"{s}={r.journal_id or ''}" for s, r in sorted(e.members.items())),
            }
            for e in matched.entries
        ),
        fmt,
    )

    def per_year(y: int) -> dict[str, Any]:
        out: dict[str, Any] = {
            "concordance": concordance_matrix(matched, y),
            "raw": quadrant_assess_raw(matched, y),
            "norm": quadrant_assess_normalized(matched, y),
        }
        try:
            out["rank"] = rank_difference_analysis(matched, y)
        except ComparisonError as exc:
            logger.warning("rank differences for %d skipped: %s", y, exc)
            out["rank"] = None
        return out

    results = dict(zip(years, parallel_map(per_year, years)))

    write_table(
        stage,
        "concordance",
        ("year", "x", "y", "n", "spearman", "ccc", "note"),
        ({"year": c.year, "x": c.x, "y": c.y, "n": c.n, "spearman": c.spearman, "ccc": c.ccc, "note": c.note}
         for y in years for c in results[y]["concordance"]),
        fmt,
    )
    for y in years:
        for mode in ("raw", "norm"):
            write_table(
                stage,
                f"quadrants_{mode}_{y}",
                ("key", "quadrant", "axis_x", "axis_y"),
                ({"key": q.key, "quadrant": q.quadrant, "axis_x": q.axis_x, "axis_y": q.axis_y}
                 for q in sorted(results[y][mode], key=lambda q: q.key)),
                fmt,
            )
        rank = results[y]["rank"]
        summary = rank.summary if rank is not None else []
        write_table(
            stage,
            f"rank_quartiles_{y}",
            ("quartile", "n", "mean_outputs", "mean_citations", "mean_i3_n", "mean_citescore",
             "mean_rank_i3_n", "mean_rank_citescore", "mean_rank_difference"),
            ({"quartile": s.quartile, "n": s.n, "mean_outputs": s.mean_outputs, "mean_citations": s.mean_citations,
              "mean_i3_n": s.mean_i3n, "mean_citescore": s.mean_citescore, "mean_rank_i3_n": s.mean_rank_i3n,
              "mean_rank_citescore": s.mean_rank_citescore, "mean_rank_difference": s.mean_rank_difference}
             for s in summary),
            fmt,
        )
        write_table(
            stage,
            f"rank_differences_{y}",
            ("key", "rank_i3_n", "rank_citescore", "rank_difference", "quartile"),
            ({"key": r.key, "rank_i3_n": r.rank_i3n, "rank_citescore": r.rank_citescore,
              "rank_difference": r.rank_difference, "quartile": r.quartile}
             for r in sorted(rank.rows if rank is not None else [], key=lambda r: r.key)),
            fmt,
        )
        qs_rows = []
        if rank is not None:
            for scheme in sorted({a.scheme for a in assignments}, key=lambda s: s.value):
                res = quartile_subject_proportions(rank, assignments, matched, scheme)
                for panel, items in (("q1", res.top_q1), ("q4", res.top_q4)):
                    for pos, s in enumerate(items, start=1):
                        props = s.proportions
                        qs_rows.append(
                            {"scheme": scheme.value, "panel": panel, "rank": pos, "subject_id": s.subject_id,
                             "label": s.label, "n": s.n, "n_q1": s.counts[0], "n_q2": s.counts[1],
                             "n_q3": s.counts[2], "n_q4": s.counts[3], "share_q1": props[0], "share_q4": props[3]}
                        )
        write_table(
            stage,
            f"quartile_subjects_{y}",
            ("scheme", "panel", "rank", "subject_id", "label", "n", "n_q1", "n_q2", "n_q3", "n_q4",
             "share_q1", "share_q4"),
            qs_rows,
            fmt,
        )

    edges = subject_crosswalk(assignments, matched, args.crosswalk_threshold)
    write_table(
        stage,
        "crosswalk_edges",
        ("scheme_a", "subject_a", "scheme_b", "subject_b", "overlap"),
        ({"scheme_a": e.subject_a[0].value, "subject_a": e.subject_a[1], "scheme_b": e.subject_b[0].value,
          "subject_b": e.subject_b[1], "overlap": e.overlap} for e in edges),
        fmt,
    )

    pair_ok = y1 in years_present and y2 in years_present
    trend_rows = []
    if pair_ok:
        entry_subjects = subjects_by_entry(assignments, matched)
        for group in mapped_subject_groups(edges):
            for ind in TREND_INDICATORS:
                t = subject_trend(group, matched, ind, y1, y2, entry_subjects=entry_subjects)
                trend_rows.append(
                    {"subjects": "|".join(_subject_ref(s) for s in t.subjects), "indicator": ind, "y1": y1, "y2": y2,
                     "n": t.n, "direction": t.direction, "stars": t.stars,
                     "statistic": t.test.statistic if t.test else None, "p_value": _fmt_p(t.test),
                     "method": t.test.method.value if t.test else None, "unpaired_p": _fmt_p(t.unpaired),
                     "reason": t.reason}
                )
    write_table(
        stage,
        "subject_trends",
        ("subjects", "indicator", "y1", "y2", "n", "direction", "stars", "statistic", "p_value", "method",
         "unpaired_p", "reason"),
        trend_rows,
        fmt,
    )

    shifts = publisher_distribution(matched, y1, y2, args.min_publisher_journals) if pair_ok else []
    write_table(
        stage,
        "publisher_shift",
        ("publisher", "n_y1", "n_y2", "median_y1", "median_y2", "delta_pct", "verdict", "n_paired", "p_value"),
        ({"publisher": s.publisher, "n_y1": s.n_y1, "n_y2": s.n_y2, "median_y1": s.median_y1,
          "median_y2": s.median_y2, "delta_pct": s.delta_pct, "verdict": s.verdict, "n_paired": s.n_paired,
          "p_value": s.p_value} for s in shifts),
        fmt,
    )

    points = ecdf_shift(matched, y1, y2) if pair_ok else []
    write_table(
        stage,
        "ecdf_diff",
        ("indicator", "t", "f_y1", "f_y2", "diff"),
        ({"indicator": p.indicator, "t": p.t, "f_y1": p.f_y1, "f_y2": p.f_y2, "diff": p.diff} for p in points),
        fmt,
    )
    if not pair_ok:
        logger.warning("years %d and %d are not both present; year-pair outputs are empty", y1, y2)


def cmd_compare(args: argparse.Namespace) -> None:
    view, _, paths = _load(args, papers_required=False)
    tables, table_paths = _tables(args, view)
    matched = match_journals(tables)
    present = matched.years()
    if args.years is not None:
        y1, y2 = sorted(args.years)
    elif len(present) >= 2:
        y1, y2 = present[-2], present[-1]
    elif present:
        y1 = y2 = present[-1]
    else:
        raise DataError("indicator tables hold no defined values")
    config = {
        "years": [y1, y2],
        "crosswalk_threshold": args.crosswalk_threshold,
        "min_publisher_journals": args.min_publisher_journals,
        "format": args.fmt,
        "sources": list(matched.sources),
    }
    extra = {
        "matching": {
            "matched": len(matched),
            "unmatched": matched.unmatched,
            "ambiguous_keys": matched.ambiguous,
            "conflicts": matched.conflicts,
            "by_key": {
                k: sum(1 for e in matched.entries if e.match_key_used.value == k) for k in ("issn", "eissn", "title")
            },
        }
    }
    with Run("compare", args.out, config, {**paths, **table_paths}, extra) as run:
        _compare_outputs(args, run, matched, view, y1, y2)


def cmd_report(args: argparse.Namespace) -> None:
    view, _, paths = _load(args, papers_required=False)
    tables, table_paths = _tables(args, view)
    rows = []
    lines = ["# Indicator summary", ""]
    for t in tables:
        single = match_journals([t])
        years = single.years()
        stats = descriptive_table(single, years, ("n_pubs", "i3", "i3_n", "jif", "citescore"))
        lines += [f"## {t.source}", "", f"Journals: {len(t.rows)}. Years: {', '.join(map(str, years)) or 'none'}.", ""]
        lines += ["| indicator | year | n | min | mean | median | max | sd |", "|---|---|---|---|---|---|---|---|"]
        for ind, y, d in stats:
            rows.append({"source": t.source, "indicator": ind, "year": y, **vars(d)})
            lines.append(
                f"| {ind} | {y} | {d.n} | {d.min:.2f} | {d.mean:.2f} | {d.median:.2f} | {d.max:.2f} | {d.sd:.2f} |"
            )
        lines.append("")
    with Run("report", args.out, {"format": args.fmt}, {**paths, **table_paths}) as run:
        write_table(
            run.stage,
            "descriptive_stats",
            ("source", "indicator", "year", "n", "min", "mean", "median", "max", "ci95_low", "ci95_high", "sd", "se"),
            rows,
            args.fmt,
        )
        (run.stage / "report.md").write_text("\n".join(lines), encoding="utf-8")


def cmd_synth(args: argparse.Namespace) -> None:
    tiers = PLANTED_TIERS if args.model == "planted" else ()
    cfg = GeneratorConfig(
        seed=args.seed,
        n_papers=args.n_papers,
        n_journals=args.n_journals,
        citation_model=args.model,
        tiers=tiers,
        year_range=tuple(args.year_range),  # type: ignore[arg-type]
    )
    corpus = generate(cfg)
    config = {
        "seed": args.seed,
        "n_papers": args.n_papers,
        "n_journals": args.n_journals,
        "model": args.model,
        "year_range": list(args.year_range),
    }
    with Run("synth", args.out, config) as run:
        corpus.write(run.stage)
        write_table(
            run.stage,
            "journal_tiers",
            ("journal_id", "tier"),
            ({"journal_id": j, "tier": t} for j, t in sorted(corpus.journal_tier.items())),
            "csv",
        )


def cmd_selftest(args: argparse.Namespace) -> None:
    from .selftest import run_selftest

    results = run_selftest(args.seed)
    with Run("selftest", args.out, {"seed": args.seed}) as run:
        write_json(run.stage / "selftest.json", results)
    if not results["passed"]:
        raise SelfTestFailure(f"selftest failed: {results['failures']}")


COMMANDS: dict[str, Callable[[argparse.Namespace], None]] = {
    "ingest": cmd_ingest,
    "compute": cmd_compute,
    "compare": cmd_compare,
    "report": cmd_report,
    "synth": cmd_synth,
    "selftest": cmd_selftest,
}


def _fail(code: int, kind: str, exc: BaseException) -> int:
    msg = str(exc).replace("\n", " ")
    print(json.dumps({"error": kind, "exit": code, "type": type(exc).__name__, "message": msg}), file=sys.stderr)
    return code


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        return _fail(EXIT_USAGE, "usage", exc)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s"
    )
    try:
        threads()
        COMMANDS[args.command](args)
    except UsageError as exc:
        return _fail(EXIT_USAGE, "usage", exc)
    except (DataError, CorpusError, ComparisonError, InfeasibleConfig, CohortError, OSError) as exc:
        return _fail(EXIT_DATA, "data", exc)
    except SelfTestFailure as exc:
        return _fail(EXIT_INTERNAL, "internal", exc)
    except Exception as exc:  # noqa: BLE001
        logger.debug("internal error", exc_info=True)
        return _fail(EXIT_INTERNAL, "internal", exc)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
