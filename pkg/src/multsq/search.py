"""Exhaustive search over F_p for normalized multiplicative series with multiplicative square.

Rows of candidate coefficient vectors are processed together as integer
arrays.  Walking the indices in increasing order:

* a composite index ``n`` gets ``a_n = prod a_{p^e}``;
* if ``n - 1`` is a prime power, the constraint ``P_n`` is affine in
  ``a_{n-1}`` with slope ``2 (2 c_0)^(k-1)`` and is used to solve for it;
* otherwise ``P_n`` is a genuine check and rows failing it are dropped;
* a prime power ``k`` not followed by a composite is a free choice.  The
  first check after ``k`` at an index ``m <= 2k - 1`` is affine in ``a_k``,
  so when no other free index intervenes, ``a_k`` is solved from two
  evaluations instead of being enumerated.

Constraints are compared in the cleared-denominator form
``s_n (2 c_0)^(k-1) = prod s_{p^e}`` with ``s`` the coefficients of ``f^2``
(and ``f^4`` with ``4 c_0^3`` for the fourth-power system).
"""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable

import numpy as np

from .catalog import ALL_IDS, SolutionId, family_parts
from .primepowers import default_table
from .rings import FpElem, NotInvertibleError, PrimeField, QuadElem, p_valuation, reduce_mod_p, sqrt_in_fp
from .series import TruncSeries

log = logging.getLogger(__name__)

__all__ = [
    "RECORD_INDICES",
    "SearchConfig",
    "SolutionRecord",
    "SearchResult",
    "enumerate_solutions",
    "search",
    "classify_record",
    "dedup_sign",
    "flip_tuple",
    "theorem4_search",
    "known_reductions",
    "record_series",
]

RECORD_INDICES = (2, 3, 4, 5, 7, 8, 9, 11, 13, 16)
"""Prime-power indices up to 16; with ``1/2a_0`` in front they form a table row."""


@dataclass(frozen=True)
class SearchConfig:
    p: int
    D1: int = 16
    D2: int = 300
    exclude_known: bool = True
    exclude_sparse: bool = True
    dedup_sign: bool = True
    wildcard_c0: bool = False
    threads: int = 1

    def __post_init__(self):
        if self.D1 != 16:
            raise ValueError("the prefix depth is fixed at 16")
        if self.D2 < self.D1:
            raise ValueError("D2 must be >= D1")
        PrimeField(self.p)  # validates p


@dataclass(frozen=True)
class SolutionRecord:
    p: int
    c0: int
    coeffs: tuple[int, ...]
    depth: int
    classification: str = "exceptional"
    family: str | None = None
    param: str | None = None
    extension: tuple[int, ...] = field(default=(), compare=False, repr=False)

    @property
    def row(self) -> tuple[int, ...]:
        return (self.c0,) + self.coeffs

    @property
    def a(self) -> dict[int, int]:
        return dict(zip(RECORD_INDICES, self.coeffs))

    def label(self) -> str:
        if self.classification == "known":
            return f"known({self.family}, {self.param})"
        return self.classification


@dataclass
class SearchResult:
    config: SearchConfig
    records: list[SolutionRecord]
    raw_count: int = 0
    near_misses: dict[tuple[int, ...], int] = field(default_factory=dict)


# ---------------------------------------------------------------------------
# Plan
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Step:
    kind: str  # enum | affine | zero | pending | solve | check
    factors: tuple[int, ...] = ()
    target: int = 0  # check index used by an affine step


@lru_cache(maxsize=64)
def _plan(D: int, use_q: bool, record_max: int = 16) -> tuple[_Step, ...]:
    tab = default_table(max(D + 2, 64))
    is_pp = lambda n: tab.is_prime_power(n)
    steps: list[_Step] = [_Step("fixed"), _Step("fixed")]
    for n in range(2, D + 1):
        if not is_pp(n):
            fs = tuple(tab.prime_power_factors(n))
            steps.append(_Step("solve" if is_pp(n - 1) else "check", fs))
        elif n + 1 <= D and not is_pp(n + 1):
            steps.append(_Step("pending"))
        else:
            steps.append(_Step("free"))

    def is_check(m):
        return steps[m].kind == "check" or (use_q and steps[m].kind == "solve")

    out = list(steps)
    for k in range(2, D + 1):
        if steps[k].kind != "free":
            continue
        m = next((m for m in range(k + 1, D + 1) if is_check(m)), None)
        if m is None:
            out[k] = _Step("enum" if k <= record_max else "zero")
            continue
        window_free = any(steps[j].kind == "free" for j in range(k + 1, m))
        if m <= 2 * k - 1 and not window_free:
            out[k] = _Step("affine", target=m)
        else:
            out[k] = _Step("enum")
    return tuple(out)


# ---------------------------------------------------------------------------
# Vectorized state
# ---------------------------------------------------------------------------


def _square_coeff(A: np.ndarray, n: int, p: int) -> np.ndarray:
    """Coefficient ``n`` of the square of each column series, mod ``p``."""
    h = (n + 1) // 2
    acc = 2 * np.einsum("ij,ij->j", A[:h], A[n : n - h : -1])
    if n % 2 == 0:
        acc += A[n // 2] * A[n // 2]
    return acc % p


class _State:
    """Column-major coefficient arrays: ``A[n]`` is the vector of ``a_n`` over rows."""

    __slots__ = ("p", "D", "use_q", "A", "S", "F", "inv")

    def __init__(self, p, D, use_q, A, S, F, inv):
        self.p, self.D, self.use_q = p, D, use_q
        self.A, self.S, self.F, self.inv = A, S, F, inv

    @property
    def rows(self) -> int:
        return self.A.shape[1]

    def copy(self) -> "_State":
        return _State(self.p, self.D, self.use_q, self.A.copy(), self.S.copy(),
                      None if self.F is None else self.F.copy(), self.inv)

    def take(self, idx) -> "_State":
        return _State(self.p, self.D, self.use_q, self.A[:, idx], self.S[:, idx],
                      None if self.F is None else self.F[:, idx], self.inv)

    def recompute(self, n: int) -> None:
        self.S[n] = _square_coeff(self.A, n, self.p)
        if self.F is not None:
            self.F[n] = _square_coeff(self.S, n, self.p)

    @property
    def capacity(self) -> int:
        return self.A.shape[0] - 1

    def grow(self, D: int) -> None:
        """Extend the coefficient arrays to index ``D`` (zeros beyond the old end)."""
        extra = D - self.capacity
        if extra <= 0:
            return
        pad = lambda a: None if a is None else np.concatenate(
            [a, np.zeros((extra, a.shape[1]), dtype=a.dtype)])
        self.A, self.S, self.F = pad(self.A), pad(self.S), pad(self.F)

    def residual(self, arr, n: int, factors, base) -> np.ndarray:
        p = self.p
        prod = np.ones(self.rows, dtype=arr.dtype)
        for f in factors:
            prod = prod * arr[f] % p
        lhs = arr[n].copy()
        for _ in range(len(factors) - 1):
            lhs = lhs * base % p
        return (lhs - prod) % p

    def base_P(self):
        return 2 * self.A[0] % self.p

    def base_Q(self):
        c0 = self.A[0]
        return 4 * c0 % self.p * c0 % self.p * c0 % self.p


_PREFIX_CAP = 48


def _new_state(p: int, D: int, use_q: bool, c0: np.ndarray) -> _State:
    # wide prefix rows only need the first few dozen coefficients; _run grows
    # the arrays once the row count has been cut down
    R = len(c0)
    # int32 halves memory traffic; a coefficient of a square sums at most
    # D + 1 products below p^2
    dt = np.int32 if 2 * (p - 1) ** 2 * (D + 2) < 2**31 else np.int64
    A = np.zeros((min(D, _PREFIX_CAP) + 1, R), dtype=dt)
    A[0] = c0
    A[1] = 1
    S = np.zeros_like(A)
    F = np.zeros_like(A) if use_q else None
    inv = np.array([0] + [pow(x, -1, p) for x in range(1, p)], dtype=dt)
    st = _State(p, D, use_q, A, S, F, inv)
    st.recompute(0)
    st.recompute(1)
    return st


def _set_composite(st: _State, n: int, factors) -> None:
    prod = np.ones(st.rows, dtype=st.A.dtype)
    for f in factors:
        prod = prod * st.A[f] % st.p
    st.A[n] = prod
    st.recompute(n)


def _composite_residuals(st: _State, n: int, step: _Step) -> list[np.ndarray]:
    """Solve ``a_{n-1}`` if pending, then return the check residuals at ``n``."""
    p = st.p
    _set_composite(st, n, step.factors)
    res = []
    rP = st.residual(st.S, n, step.factors, st.base_P())
    if step.kind == "solve":
        slope = np.full(st.rows, 2, dtype=st.A.dtype)
        b = st.base_P()
        for _ in range(len(step.factors) - 1):
            slope = slope * b % p
        st.A[n - 1] = (-rP) % p * st.inv[slope] % p
        st.recompute(n - 1)
        st.recompute(n)
    else:
        res.append(rP)
    if st.use_q:
        res.append(st.residual(st.F, n, step.factors, st.base_Q()))
    return res


class _Tracker:
    def __init__(self, record_from: int, keep_from: int):
        self.record_from = record_from
        self.keep_from = keep_from
        self.best: dict[tuple[int, ...], int] = {}

    def dead(self, st: _State, mask: np.ndarray, n: int) -> None:
        if n - 1 < self.keep_from or not mask.any():
            return
        cols = [0] + list(RECORD_INDICES)
        sub = st.A[cols][:, mask].T
        for row in map(tuple, sub.tolist()):
            if self.best.get(row, -1) < n - 1:
                self.best[row] = n - 1


def _filter(st: _State, res: list[np.ndarray], n: int, tracker: _Tracker | None) -> _State:
    ok = np.ones(st.rows, dtype=bool)
    for r in res:
        ok &= r == 0
    if tracker is not None:
        tracker.dead(st, ~ok, n)
    return st if ok.all() else st.take(ok)


def _run(st: _State, plan, start: int, stop: int, tracker=None, sparse_hook=None) -> _State:
    p = st.p
    for n in range(start, stop + 1):
        if st.rows == 0:
            return st
        step = plan[n]
        if max(n, step.target) > st.capacity:
            st.grow(st.D)
        if step.kind in ("solve", "check"):
            res = _composite_residuals(st, n, step)
            if res:
                st = _filter(st, res, n, tracker)
        elif step.kind in ("pending", "zero"):
            st.A[n] = 0
            st.recompute(n)
        elif step.kind == "enum":
            R = st.rows
            st = st.take(np.repeat(np.arange(R), p))
            st.A[n] = np.tile(np.arange(p, dtype=st.A.dtype), R)
            st.recompute(n)
        elif step.kind == "affine":
            st = _affine(st, plan, n, step.target)
        else:  # pragma: no cover
            raise AssertionError(step)
        if sparse_hook is not None and n == 15:
            st = sparse_hook(st)
    return st


def _probe(st: _State, plan, k: int, m: int, value: int) -> list[np.ndarray]:
    """Residuals at ``m`` with ``a_k = value``; ``st`` is restored afterwards."""
    saved = [None if a is None else a[k : m + 1].copy() for a in (st.A, st.S, st.F)]
    st.A[k] = value
    st.recompute(k)
    for n in range(k + 1, m):
        step = plan[n]
        if step.kind == "pending":
            st.A[n] = 0
            st.recompute(n)
        else:
            assert step.kind == "solve", (n, step)
            assert not _composite_residuals(st, n, step)
    res = [r.copy() for r in _composite_residuals(st, m, plan[m])]
    for a, sv in zip((st.A, st.S, st.F), saved):
        if a is not None:
            a[k : m + 1] = sv
    return res


def _affine(st: _State, plan, k: int, m: int) -> _State:
    p = st.p
    r0 = _probe(st, plan, k, m, 0)
    r1 = _probe(st, plan, k, m, 1)
    slopes = [(b - a) % p for a, b in zip(r0, r1)]
    x = np.zeros(st.rows, dtype=st.A.dtype)
    solved = np.zeros(st.rows, dtype=bool)
    for a, s in zip(r0, slopes):
        pick = ~solved & (s != 0)
        x[pick] = (-a[pick]) % p * st.inv[s[pick]] % p
        solved |= pick
    consistent = np.ones(st.rows, dtype=bool)
    for a, s in zip(r0, slopes):
        consistent &= (a + s * x) % p == 0
    unique = solved & consistent
    branch = ~solved & consistent  # every slope is 0 and every residual is 0
    idx = np.concatenate([np.flatnonzero(unique), np.repeat(np.flatnonzero(branch), p)])
    vals = np.concatenate([x[unique], np.tile(np.arange(p, dtype=x.dtype), int(branch.sum()))])
    out = st.take(idx)
    out.A[k] = vals
    out.recompute(k)
    return out


def _chunk(args) -> tuple[np.ndarray, dict]:
    p, D, use_q, c0, a2, keep_sparse, track_from = args
    plan = _plan(D, use_q)
    assert plan[2].kind == "enum"
    st = _new_state(p, D, use_q, np.array([c0], dtype=np.int64))
    st.A[2] = a2
    st.recompute(2)

    def sparse_hook(s: _State) -> _State:
        if keep_sparse:
            return s
        nz = np.zeros(s.rows, dtype=bool)
        for i in range(2, 16):
            nz |= s.A[i] != 0
        return s if nz.all() else s.take(nz)

    tracker = _Tracker(16, track_from) if track_from is not None else None
    st = _run(st, plan, 3, D, tracker, sparse_hook if D >= 15 else None)
    return st.A.T.astype(np.int64), (tracker.best if tracker else {})


def _flip_rows(full: np.ndarray, p: int) -> np.ndarray:
    out = full.copy()
    out[:, 0::2] = (-out[:, 0::2]) % p
    return out


def _raw_search(p: int, D: int, use_q: bool, keep_sparse: bool, threads: int = 1,
                track_from: int | None = None) -> tuple[np.ndarray, dict]:
    # f -> -f(-q) preserves both systems and negates 1/2a_0, so only half of
    # the constant terms are searched
    half = range(1, (p - 1) // 2 + 1)
    jobs = [(p, D, use_q, c0, a2, keep_sparse, track_from) for c0 in half for a2 in range(p)]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(_chunk, jobs, chunksize=max(1, len(jobs) // (4 * threads))))
    else:
        parts = [_chunk(j) for j in jobs]
    rows = [a for a, _ in parts if len(a)]
    misses: dict = {}
    for _, best in parts:
        for k, v in best.items():
            for key in (k, flip_tuple(k, p)):
                if misses.get(key, -1) < v:
                    misses[key] = v
    full = np.concatenate(rows) if rows else np.zeros((0, D + 1), dtype=np.int64)
    return np.concatenate([full, _flip_rows(full, p)]), misses


def _records_from_rows(p: int, full: np.ndarray, depth: int) -> list[SolutionRecord]:
    cols = [0] + list(RECORD_INDICES)
    seen: dict[tuple, tuple] = {}
    for r in full.tolist():
        key = tuple(r[i] for i in cols)
        if key not in seen:
            seen[key] = tuple(r)
    return [SolutionRecord(p, k[0], k[1:], depth, extension=ext) for k, ext in sorted(seen.items())]


# ---------------------------------------------------------------------------
# Known families mod p
# ---------------------------------------------------------------------------


def _den_exponent(x, p: int) -> int:
    if isinstance(x, QuadElem):
        return max(0, -p_valuation(x.a, p), -p_valuation(x.b, p))
    return max(0, -p_valuation(x, p))


def _family_prefixes(sid: SolutionId, p: int, wildcard: bool) -> list[tuple[tuple[int, ...], str]]:
    """Depth-16 rows of the reductions of one catalog entry mod ``p``.

    Parametric entries are swept over ``t in F_p`` minus ``-1``.  With
    ``wildcard`` set, a residue class of ``t`` on which the constant term has
    a pole mod ``p`` but whose leading part cancels contributes every unit as
    ``1/2a_0`` (a rational ``t`` in that class can hit any constant term).
    """
    parts = family_parts(sid, 16)
    d = sid.radicand
    roots = [None] if d is None else sorted(int(r) for r in sqrt_in_fp(d, p))
    red = lambda x, root: int(reduce_mod_p(x, p, root))
    out = []
    for root in roots:
        rlabel = "" if root is None else f", sqrt({d})={root}"
        try:
            a0 = [red(parts.f0[n], root) for n in RECORD_INDICES]
            a1 = [red(parts.f1[n], root) for n in RECORD_INDICES] if parts.f1 is not None else None
        except NotInvertibleError:
            continue
        U = parts.f0[0]
        V = parts.f1[0] if parts.f1 is not None else None
        for t in (range(p) if V is not None else [None]):
            coeffs = tuple(a0) if t is None else tuple((x + t * y) % p for x, y in zip(a0, a1))
            tlabel = "" if t is None else f"t={t}"
            try:
                c0 = red(U if t is None else U + V * t, root)
            except NotInvertibleError:
                if wildcard and t is not None:
                    e = max(_den_exponent(U, p), _den_exponent(V, p))
                    try:
                        us, vs = red(U * p**e, root), red(V * p**e, root)
                    except NotInvertibleError:
                        continue
                    if (us + t * vs) % p == 0 and vs % p:
                        out.extend(((c,) + coeffs, tlabel + rlabel + ", c0 free") for c in range(1, p))
                continue
            if t == p - 1:
                continue  # outside the parameter domain
            if c0:
                out.append(((c0,) + coeffs, tlabel + rlabel))
    return out


@lru_cache(maxsize=64)
def known_reductions(p: int, wildcard: bool = False) -> dict[tuple[int, ...], tuple[str, str]]:
    """Depth-16 table rows of catalog reductions mod ``p`` and their sign flips."""
    table: dict[tuple[int, ...], tuple[str, str]] = {}
    for sid in ALL_IDS:
        for row, label in _family_prefixes(sid, p, wildcard):
            table.setdefault(row, (str(sid), label))
    for row, (sid, label) in list(table.items()):
        table.setdefault(flip_tuple(row, p), (f"-f(-q) of {sid}", label))
    return table


def flip_tuple(row: tuple[int, ...], p: int) -> tuple[int, ...]:
    """Negate ``1/2a_0`` and every even-index entry of a table row."""
    idx = (0,) + RECORD_INDICES
    return tuple((-x) % p if i % 2 == 0 else x for i, x in zip(idx, row))


def _is_sparse(rec: SolutionRecord) -> bool:
    return all(v == 0 for i, v in zip(RECORD_INDICES, rec.coeffs) if i <= 15)


def classify_record(rec: SolutionRecord, wildcard: bool = False) -> SolutionRecord:
    """Return ``rec`` labelled sparse, known(family, t) or exceptional."""
    from dataclasses import replace

    if _is_sparse(rec):
        return replace(rec, classification="sparse", family=None, param=None)
    hit = known_reductions(rec.p, wildcard).get(rec.row)
    if hit:
        return replace(rec, classification="known", family=hit[0], param=hit[1])
    return replace(rec, classification="exceptional", family=None, param=None)


def dedup_sign(recs: Iterable[SolutionRecord]) -> list[SolutionRecord]:
    """Keep the lexicographically smaller row of each sign-flip pair."""
    recs = list(recs)
    rows = {r.row for r in recs}
    out = []
    for r in recs:
        f = flip_tuple(r.row, r.p)
        if f in rows and f < r.row:
            continue
        out.append(r)
    return out


# ---------------------------------------------------------------------------
# Entry points
# ---------------------------------------------------------------------------


def search(cfg: SearchConfig, track_from: int | None = None) -> SearchResult:
    """Run the search and apply the configured filters; rows sorted."""
    full, misses = _raw_search(cfg.p, cfg.D2, False, not cfg.exclude_sparse, cfg.threads, track_from)
    recs = [classify_record(r, cfg.wildcard_c0) for r in _records_from_rows(cfg.p, full, cfg.D2)]
    raw = len(recs)
    if cfg.exclude_sparse:
        recs = [r for r in recs if r.classification != "sparse"]
    if cfg.exclude_known:
        recs = [r for r in recs if r.classification != "known"]
    if cfg.dedup_sign:
        recs = dedup_sign(recs)
    recs.sort(key=lambda r: r.row)
    found = {r.row for r in _records_from_rows(cfg.p, full, cfg.D2)}
    misses = {k: v for k, v in misses.items() if k not in found}
    return SearchResult(cfg, recs, raw, misses)


def enumerate_solutions(cfg: SearchConfig) -> list[SolutionRecord]:
    return search(cfg).records


def theorem4_search(p: int, D: int = 20, threads: int = 1) -> list[SolutionRecord]:
    """All prefixes satisfying both ``P_n`` and ``Q_n`` at every composite ``n <= D``."""
    if p in (2, 3):
        log.warning("p=%d is degenerate for the fourth-power system", p)
    full, _ = _raw_search(p, D, True, True, threads)
    return [classify_record(r) for r in _records_from_rows(p, full, D)]


def record_series(rec: SolutionRecord) -> TruncSeries:
    """The stored extension of a record as a series over ``F_p``."""
    if not rec.extension:
        raise ValueError("record carries no extension")
    F = PrimeField(rec.p)
    return TruncSeries(F, tuple(FpElem._raw(int(x) % rec.p, rec.p) for x in rec.extension))
