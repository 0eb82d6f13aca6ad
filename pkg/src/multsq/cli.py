"""Command-line front end.

Every subcommand writes to stdout (or ``--out``) and exits 0 only when all
of its checks pass.  Output depends on the flags alone.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

from sympy import isprime, primerange

from . import mandelbrot as mb
from . import primepowers as pp
from .catalog import ALL_IDS, T, known_solution
from .data.appendix import TABLE_PRIMES
from .report import format_records, golden_compare, golden_path
from .search import SearchConfig, search, theorem4_search
from .series import check_normalized_multiplicative, normalized_power

CATALOG_SCHEMA = "multsq.catalog/1"
MANDEL_SCHEMA = "multsq.mandelbrot/1"
THEOREM4_SCHEMA = "multsq.theorem4/1"
REPORT_SCHEMA = "multsq.report/1"


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# verify-catalog
# ---------------------------------------------------------------------------


def _cmd_verify_catalog(args) -> tuple[str, int]:
    lines, dump, ok = [], [], True
    for sid in ALL_IDS:
        param = T if sid.parametric else None
        f = known_solution(sid, param, args.depth)
        a = check_normalized_multiplicative(f)
        b = check_normalized_multiplicative(normalized_power(f, 2))
        good = a.ok and b.ok
        ok &= good
        ring = f.ring
        lines.append(f"{'PASS' if good else 'FAIL'} ({sid}) ring={ring} N={args.depth}"
                     + ("" if good else f" f={a.violations[:3]} f^2={b.violations[:3]}"))
        if args.dump:
            d = f.to_json()
            dump.append({"id": str(sid), "parameter": "t" if param else None,
                         "ring": d["ring"], "N": args.depth, "coefficients": d["coefficients"]})
    if args.dump:
        return _dumps({"schema": CATALOG_SCHEMA, "entries": dump}), 0 if ok else 1
    return "\n".join(lines) + "\n", 0 if ok else 1


# ---------------------------------------------------------------------------
# search / theorem4
# ---------------------------------------------------------------------------


def _cmd_search(args) -> tuple[str, int]:
    cfg = SearchConfig(
        args.mod,
        D2=args.d2,
        exclude_known=not args.include_known,
        exclude_sparse=not args.include_sparse,
        dedup_sign=not args.no_dedup,
        threads=args.threads,
    )
    res = search(cfg)
    return format_records(cfg, res.records, args.format), 0


def _cmd_theorem4(args) -> tuple[str, int]:
    recs = theorem4_search(args.mod, args.d, threads=args.threads)
    doc = {
        "schema": THEOREM4_SCHEMA,
        "p": args.mod,
        "D": args.d,
        "records": [{"row": list(r.row), "classification": r.classification,
                     "family": r.family, "param": r.param} for r in recs],
    }
    ok = all(r.classification == "known" for r in recs)
    return _dumps(doc), 0 if ok else 1


# ---------------------------------------------------------------------------
# mandelbrot
# ---------------------------------------------------------------------------


def _cx(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _cmd_mandelbrot(args) -> tuple[str, int]:
    if args.action == "poly":
        m = mb.mandel_poly(args.n)
        doc = {"schema": MANDEL_SCHEMA, "n": args.n, "coeffs": [str(c) for c in m.coeffs],
               "display": str(m)}
        return _dumps(doc), 0
    if args.action == "roots":
        infos = mb.roots_numeric(args.n)
        rows = []
        for r in infos:
            w = -2 * r.root
            k = mb.escape_test(w, 1000)
            rows.append((args.n, r.root, w, -1 if k is None else k, r.dist_to_quarter))
        return _locus_text(rows, args.format), 0
    if args.action == "integrality":
        out, ok = [], True
        for p in primerange(2, args.pmax + 1):
            for n in range(2, args.nmax + 1):
                if p > 2 and math.comb(2 * n, n) % p == 0:
                    continue
                good, poly = mb.newton_polygon_integrality(n, p)
                ok &= good
                if not good:
                    out.append({"n": n, "p": p, "slopes": [str(s) for s in poly.slopes]})
        doc = {"schema": MANDEL_SCHEMA, "nmax": args.nmax, "pmax": args.pmax,
               "failures": out, "verdict": "pass" if ok else "fail"}
        return _dumps(doc), 0 if ok else 1
    if args.action == "witness2000":
        rows, ok = [], True
        for q in primerange(2, args.qmax):
            w = pp.mersenne_witness_search(q)
            if w is None and 2**q - 1 < 16:
                # a sparse index is >= 16, so such q never arise
                rows.append({"q": q, "witness": None, "note": "2^q-1 < 16, not a sparse index"})
                continue
            ok &= w is not None
            rows.append({"q": q, "witness": list(w) if w else None})
        doc = {"schema": MANDEL_SCHEMA, "qmax": args.qmax, "rows": rows,
               "verdict": "pass" if ok else "fail"}
        return _dumps(doc), 0 if ok else 1
    if args.action == "locus":
        rows = [(r["n"], r["root"], r["minus2r"], r["escape_iter"], r["dist_to_quarter"])
                for r in mb.root_locus_export(args.nmax)]
        return _locus_text(rows, "csv"), 0
    raise ValueError(args.action)


LOCUS_COLUMNS = ("n", "re_root", "im_root", "re_minus2r", "im_minus2r", "escape_iter", "dist_to_quarter")


def _locus_text(rows, fmt: str) -> str:
    if fmt == "json":
        return _dumps({"schema": MANDEL_SCHEMA, "columns": list(LOCUS_COLUMNS),
                       "rows": [[n, *_cx(r), *_cx(w), k, d] for n, r, w, k, d in rows]})
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(LOCUS_COLUMNS)
    for n, r, w, k, d in rows:
        wr.writerow((n, f"{r.real:.15g}", f"{r.imag:.15g}", f"{w.real:.15g}", f"{w.imag:.15g}",
                     k, f"{d:.15g}"))
    return buf.getvalue()


# ---------------------------------------------------------------------------
# lemmas
# ---------------------------------------------------------------------------


def _cmd_lemmas(args) -> tuple[str, int]:
    reports = []
    if args.lemma == "ap":
        ks = [args.k] if args.k else [5, 6, 7]
        reports = [pp.verify_ap_lemma(k) for k in ks]
    elif args.lemma == "gaps":
        reports = [pp.verify_gap_lemma(name, *ps) for name, ps in pp.applicable_gap_instances(args.bound)]
    elif args.lemma in pp.GAP_LEMMAS:
        if not args.params:
            reports = [pp.verify_gap_lemma(name, *ps) for name, ps in pp.applicable_gap_instances(args.bound)
                       if name == args.lemma]
        else:
            reports = [pp.verify_gap_lemma(args.lemma, *args.params)]
    elif args.lemma == "nondividing":
        kmax = args.k or 10_000
        worst = max(pp.smallest_nondividing_prime(k) / (4 * k + 1) for k in range(2, kmax + 1))
        rep = pp.WitnessReport("SmallestNondividingPrime", {"kmax": kmax},
                               note=f"max ratio to 4k+1: {worst:.6f}")
        rep.passed = worst <= 1
        reports = [rep]
    else:
        raise ValueError(args.lemma)
    text = "".join(json.dumps(r.to_json(), sort_keys=True) + "\n" for r in reports)
    return text, 0 if all(r.passed for r in reports) else 1


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------


def _cmd_report(args) -> tuple[str, int]:
    """Search each requested prime and compare against its golden table."""
    primes = args.primes or list(TABLE_PRIMES)
    entries, ok = [], True
    import tempfile

    for p in primes:
        cfg = SearchConfig(p, D2=args.d2, threads=args.threads)
        text = format_records(cfg, search(cfg).records, "md")
        with tempfile.NamedTemporaryFile("w", suffix=".md", delete=False) as fh:
            fh.write(text)
        diff = golden_compare(fh.name, golden_path(p))
        Path(fh.name).unlink()
        ok &= diff.identical
        entries.append({"p": p, "identical": diff.identical, "diff": diff.lines})
    doc = {"schema": REPORT_SCHEMA, "D2": args.d2, "tables": entries,
           "verdict": "pass" if ok else "fail"}
    return _dumps(doc), 0 if ok else 1


# ---------------------------------------------------------------------------


def _odd_prime(s: str) -> int:
    p = int(s)
    if p < 3 or not isprime(p):
        raise argparse.ArgumentTypeError(f"{s} is not an odd prime")
    return p


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="multsq", description=__doc__.splitlines()[0])
    # global flags are accepted before or after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    for parser, default in ((ap, None), (common, argparse.SUPPRESS)):
        parser.add_argument("--threads", type=int, default=1 if default is None else default)
        parser.add_argument("--seed", type=int, default=0 if default is None else default,
                            help="reserved; no effect on output")
        parser.add_argument("--out", type=Path, default=default)
    sub = ap.add_subparsers(dest="command", required=True)

    def command(name: str, **kw) -> argparse.ArgumentParser:
        return sub.add_parser(name, parents=[common], **kw)

    s = command("verify-catalog", help="multiplicativity of every catalog entry and its square")
    s.add_argument("--depth", type=int, default=200)
    s.add_argument("--dump", action="store_true", help="emit the expansions as JSON instead")

    s = command("search", help="exceptional solutions mod p")
    s.add_argument("--mod", type=_odd_prime, required=True)
    s.add_argument("--d2", type=int, default=SearchConfig.D2)
    s.add_argument("--include-known", action="store_true")
    s.add_argument("--include-sparse", action="store_true")
    s.add_argument("--no-dedup", action="store_true")
    s.add_argument("--format", choices=("md", "json", "csv"), default="md")

    s = command("theorem4", help="joint search on f^2 and f^4 constraints")
    s.add_argument("--mod", type=_odd_prime, default=7)
    s.add_argument("--d", type=int, default=20)

    s = command("mandelbrot", help="Mandelbrot polynomial computations")
    msub = s.add_subparsers(dest="action", required=True)
    m = msub.add_parser("poly")
    m.add_argument("--n", type=int, required=True)
    m = msub.add_parser("roots")
    m.add_argument("--n", type=int, required=True)
    m.add_argument("--format", choices=("csv", "json"), default="csv")
    m = msub.add_parser("integrality")
    m.add_argument("--nmax", type=int, default=100)
    m.add_argument("--pmax", type=int, default=50)
    m = msub.add_parser("witness2000")
    m.add_argument("--qmax", type=int, default=2000)
    m = msub.add_parser("locus")
    m.add_argument("--nmax", type=int, default=40)

    s = command("lemmas", help="witness reports for the prime-power lemmas")
    s.add_argument("--lemma", choices=("ap", "gaps", "nondividing") + pp.GAP_LEMMAS, required=True)
    s.add_argument("--k", type=int, default=None)
    s.add_argument("--params", type=int, nargs="*", default=None)
    s.add_argument("--bound", type=int, default=1 << 31)

    s = command("report", help="reproduce the published tables and diff against golden files")
    s.add_argument("--primes", type=_odd_prime, nargs="*", default=None)
    s.add_argument("--d2", type=int, default=SearchConfig.D2)
    return ap


_DISPATCH = {
    "verify-catalog": _cmd_verify_catalog,
    "search": _cmd_search,
    "theorem4": _cmd_theorem4,
    "mandelbrot": _cmd_mandelbrot,
    "lemmas": _cmd_lemmas,
    "report": _cmd_report,
}


def run(argv: list[str] | None = None) -> tuple[str, int]:
    args = build_parser().parse_args(argv)
    return _DISPATCH[args.command](args)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text, status = _DISPATCH[args.command](args)
    except (pp.HypothesisError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    if args.out is not None:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
