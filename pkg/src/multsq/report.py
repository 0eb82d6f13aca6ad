"""Table emission for search results and comparison against golden files.

The markdown layout follows the published tables: a caption line, a header
``| 1/2a_0 | a_2 | ... | a_16 | Comments |`` and one row per solution.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .data.appendix import COLUMNS, TABLES, annotation
from .search import SearchConfig, SolutionRecord

SEARCH_SCHEMA = "multsq.search/1"
HEADER = COLUMNS + ("Comments",)


def caption(p: int) -> str:
    return f"Exceptional solutions (mod {p})"


def comment_for(rec: SolutionRecord) -> str:
    """Printed annotation when the row is a published one, else the classification."""
    c = annotation(rec.p, rec.row)
    if c is not None:
        return c
    if rec.classification == "known":
        return rec.label()
    return rec.classification


def _md_line(cells) -> str:
    return "| " + " | ".join(str(c) for c in cells) + " |"


def markdown_table(p: int, rows: list[tuple[tuple[int, ...], str]]) -> str:
    lines = [caption(p), "", _md_line(HEADER), "|" + "---|" * len(HEADER)]
    lines += [_md_line(row + (c,)) for row, c in rows]
    return "\n".join(lines) + "\n"


def format_markdown(p: int, recs: list[SolutionRecord]) -> str:
    return markdown_table(p, [(r.row, comment_for(r)) for r in recs])


def format_csv(p: int, recs: list[SolutionRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("p",) + HEADER + ("classification", "depth"))
    for r in recs:
        w.writerow((p,) + r.row + (comment_for(r), r.classification, r.depth))
    return buf.getvalue()


def format_json(cfg: SearchConfig, recs: list[SolutionRecord]) -> str:
    doc = {
        "schema": SEARCH_SCHEMA,
        "p": cfg.p,
        "D1": cfg.D1,
        "D2": cfg.D2,
        "filters": {
            "exclude_known": cfg.exclude_known,
            "exclude_sparse": cfg.exclude_sparse,
            "dedup_sign": cfg.dedup_sign,
        },
        "records": [
            {
                "row": list(r.row),
                "comment": comment_for(r),
                "classification": r.classification,
                "family": r.family,
                "param": r.param,
                "depth": r.depth,
            }
            for r in recs
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def format_records(cfg: SearchConfig, recs: list[SolutionRecord], fmt: str = "md") -> str:
    if fmt == "md":
        return format_markdown(cfg.p, recs)
    if fmt == "csv":
        return format_csv(cfg.p, recs)
    if fmt == "json":
        return format_json(cfg, recs)
    raise ValueError(f"unknown format {fmt!r}")


# ---------------------------------------------------------------------------
# Golden files
# ---------------------------------------------------------------------------


def golden_text(p: int) -> str:
    """The published table for ``p`` rendered in the emission layout."""
    return markdown_table(p, TABLES[p])


def golden_path(p: int) -> Path:
    return Path(str(resources.files("multsq.data").joinpath("golden", f"mod{p}.md")))


def parse_markdown_table(text: str) -> list[tuple[str, ...]]:
    """Body rows of a table in the emission layout, cells stripped."""
    rows = []
    for line in text.splitlines():
        if not line.startswith("|") or line.startswith("|---"):
            continue
        cells = tuple(c.strip() for c in line.strip().strip("|").split("|"))
        if cells == HEADER:
            continue
        rows.append(cells)
    return rows


@dataclass
class GoldenDiff:
    identical: bool
    lines: list[str] = field(default_factory=list)

    def __bool__(self):
        return self.identical


def _row_str(cells) -> str:
    return "(" + ", ".join(cells) + ")"


def golden_compare(emitted: str | Path, golden: str | Path) -> GoldenDiff:
    """Byte comparison, with a row-level diff when the files differ.

    Rows present in both files are ignored; a golden row and an emitted row
    that differ in the same position are reported on one line.
    """
    a = Path(emitted).read_bytes()
    b = Path(golden).read_bytes()
    if a == b:
        return GoldenDiff(True)
    ea = parse_markdown_table(a.decode())
    gb = parse_markdown_table(b.decode())
    lines = []
    missing = [r for r in gb if r not in ea]
    extra = [r for r in ea if r not in gb]
    while missing and extra:
        g, e = missing.pop(0), extra.pop(0)
        lines.append(f"row {gb.index(g) + 1}: golden {_row_str(g)} emitted {_row_str(e)}")
    lines += [f"missing row {_row_str(g)}" for g in missing]
    lines += [f"extra row {_row_str(e)}" for e in extra]
    if not lines:
        ha, hb = a.decode().splitlines(), b.decode().splitlines()
        for i, (x, y) in enumerate(zip(ha, hb), 1):
            if x != y:
                lines.append(f"line {i}: golden {y!r} emitted {x!r}")
                break
        else:
            lines.append(f"length differs: golden {len(b)} bytes, emitted {len(a)} bytes")
    return GoldenDiff(False, lines)
