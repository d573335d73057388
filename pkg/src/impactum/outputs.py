"""Deterministic table writers shared by the CLI subcommands.

Undefined values are written as an empty CSV field (``null`` in JSONL).
Floats use Python's shortest round-trip repr so the text is stable.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from collections.abc import Iterable, Mapping, Sequence
from pathlib import Path
from typing import Any

FORMATS = ("csv", "jsonl")


def format_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return repr(value)
    return str(value)


def _json_value(value: Any) -> Any:
    if isinstance(value, float) and math.isnan(value):
        return None
    return value


def render_table(fields: Sequence[str], rows: Iterable[Mapping[str, Any]], fmt: str = "csv") -> str:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(fields)
        for row in rows:
            writer.writerow([format_cell(row.get(f)) for f in fields])
        return buf.getvalue()
    if fmt == "jsonl":
        return "".join(
            json.dumps({f: _json_value(row.get(f)) for f in fields}, ensure_ascii=False) + "\n" for row in rows
        )
    raise ValueError(f"unknown output format {fmt!r}")


def write_table(
    directory: Path, stem: str, fields: Sequence[str], rows: Iterable[Mapping[str, Any]], fmt: str = "csv"
) -> Path:
    path = directory / f"{stem}.{fmt}"
    path.write_text(render_table(fields, rows, fmt), encoding="utf-8")
    return path


def write_json(path: Path, obj: Any) -> Path:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8")
    return path


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def read_table(path: Path) -> list[dict[str, Any]]:
    """Read a table written by :func:`write_table`; CSV cells stay strings."""
    if path.suffix == ".jsonl":
        with path.open(encoding="utf-8") as fh:
            return [json.loads(line) for line in fh if line.strip()]
    with path.open(encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))
