import json

import pytest

from multsq.cli import main, run
from multsq.data.appendix import TABLES, annotation
from multsq.report import (
    HEADER,
    golden_compare,
    golden_path,
    golden_text,
    parse_markdown_table,
)


def _cli(capsys, *argv):
    status = main(list(argv))
    return status, capsys.readouterr().out


@pytest.mark.parametrize("p", sorted(TABLES))
def test_golden_files_render_transcribed_tables(p):
    text = golden_path(p).read_text()
    assert text == golden_text(p)
    assert text.splitlines()[0] == f"Exceptional solutions (mod {p})"
    rows = parse_markdown_table(text)
    assert [tuple(int(x) for x in r[:-1]) for r in rows] == [r for r, _ in TABLES[p]]


def test_table_sizes():
    assert {p: len(v) for p, v in TABLES.items()} == {
        3: 15, 5: 6, 7: 6, 11: 2, 13: 3, 17: 2, 19: 4, 23: 0, 29: 0, 31: 0}


def test_header_layout():
    line = golden_text(11).splitlines()[2]
    assert line == "| " + " | ".join(HEADER) + " |"
    assert HEADER[0] == "1/2a_0" and HEADER[-1] == "Comments"


def test_golden_compare_identical(tmp_path):
    a = tmp_path / "a.md"
    a.write_text(golden_text(13))
    d = golden_compare(a, golden_path(13))
    assert d.identical and d.lines == []


def test_golden_compare_perturbed_row(tmp_path):
    text = golden_text(13).replace("| 4 | 6 | 10 |", "| 4 | 6 | 11 |")
    a = tmp_path / "a.md"
    a.write_text(text)
    d = golden_compare(a, golden_path(13))
    assert not d.identical
    assert len(d.lines) == 1 and "(4, 6, 10," in d.lines[0] and "(4, 6, 11," in d.lines[0]


def test_golden_compare_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        golden_compare(tmp_path / "nope.md", golden_path(3))


def test_annotation_matches_either_flip():
    row, c = TABLES[13][0]
    from multsq.search import flip_tuple

    assert annotation(13, row) == c == annotation(13, flip_tuple(row, 13))
    assert annotation(13, (1,) * 11) is None


def test_cli_search_mod_23(capsys, tmp_path):
    status, out = _cli(capsys, "search", "--mod", "23")
    assert status == 0
    assert parse_markdown_table(out) == []
    f = tmp_path / "m23.md"
    f.write_text(out)
    assert golden_compare(f, golden_path(23)).identical


def test_cli_search_mod_5_matches_golden(capsys, tmp_path):
    status, out = _cli(capsys, "search", "--mod", "5")
    f = tmp_path / "m5.md"
    f.write_text(out)
    assert status == 0 and golden_compare(f, golden_path(5)).identical


def test_cli_search_formats(capsys):
    _, js = _cli(capsys, "search", "--mod", "13", "--format", "json")
    doc = json.loads(js)
    assert doc["schema"] == "multsq.search/1" and len(doc["records"]) == 3
    _, cs = _cli(capsys, "search", "--mod", "13", "--format", "csv")
    assert len(cs.strip().splitlines()) == 4
    _, more = _cli(capsys, "search", "--mod", "13", "--include-known", "--no-dedup", "--format", "json")
    assert len(json.loads(more)["records"]) > 6


def test_cli_deterministic():
    a = run(["search", "--mod", "7", "--format", "json"])
    b = run(["search", "--mod", "7", "--format", "json", "--seed", "5"])
    assert a == b


def test_cli_out_flag(tmp_path, capsys):
    out = tmp_path / "t.json"
    status = main(["--out", str(out), "theorem4", "--mod", "7"])
    assert status == 0 and capsys.readouterr().out == ""
    doc = json.loads(out.read_text())
    assert doc["schema"] == "multsq.theorem4/1" and len(doc["records"]) == 6


def test_cli_lemmas(capsys):
    status, out = _cli(capsys, "lemmas", "--lemma", "ap", "--k", "5")
    rep = json.loads(out)
    assert status == 0 and rep["verdict"] == "pass" and [w["a"] for w in rep["witnesses"]] == [19]
    status, out = _cli(capsys, "lemmas", "--lemma", "gaps")
    assert status == 0 and all(json.loads(l)["verdict"] == "pass" for l in out.splitlines())
    status, _ = _cli(capsys, "lemmas", "--lemma", "MersenneGaps", "--params", "7")
    assert status == 2


def test_cli_verify_catalog(capsys):
    status, out = _cli(capsys, "verify-catalog", "--depth", "40")
    assert status == 0
    assert len(out.splitlines()) == 21 and all(l.startswith("PASS") for l in out.splitlines())
    status, out = _cli(capsys, "verify-catalog", "--depth", "10", "--dump")
    doc = json.loads(out)
    assert doc["schema"] == "multsq.catalog/1"
    e = doc["entries"][0]
    assert set(e) == {"id", "parameter", "ring", "N", "coefficients"} and e["coefficients"][0] == "1/240"


def test_cli_mandelbrot(capsys):
    status, out = _cli(capsys, "mandelbrot", "poly", "--n", "2")
    assert json.loads(out)["coeffs"] == ["0", "1/2", "-1/2"]
    status, out = _cli(capsys, "mandelbrot", "roots", "--n", "4")
    lines = out.splitlines()
    assert lines[0] == "n,re_root,im_root,re_minus2r,im_minus2r,escape_iter,dist_to_quarter"
    assert len(lines) == 5
    status, out = _cli(capsys, "mandelbrot", "roots", "--n", "4", "--format", "json")
    assert len(json.loads(out)["rows"]) == 4
    status, out = _cli(capsys, "mandelbrot", "integrality", "--nmax", "30", "--pmax", "13")
    assert status == 0
    status, out = _cli(capsys, "mandelbrot", "witness2000", "--qmax", "100")
    doc = json.loads(out)
    assert status == 0 and doc["rows"][1]["q"] == 3 and doc["rows"][1]["witness"] is None
    status, out = _cli(capsys, "mandelbrot", "locus", "--nmax", "6")
    assert status == 0 and len(out.splitlines()) == 1 + sum(n - z for n, z in
                                                           [(2, 1), (3, 2), (4, 1), (5, 2), (6, 2)])


def test_cli_report_subset(capsys):
    status, out = _cli(capsys, "report", "--primes", "5", "13", "23")
    doc = json.loads(out)
    assert status == 0 and doc["verdict"] == "pass" and [t["p"] for t in doc["tables"]] == [5, 13, 23]


def test_cli_rejects_bad_flags(capsys):
    with pytest.raises(SystemExit):
        main(["search", "--mod", "9"])
    with pytest.raises(SystemExit):
        main(["search", "--mod", "7", "--bogus"])
