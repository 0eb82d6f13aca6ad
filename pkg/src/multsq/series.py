"""Truncated q-series and the multiplicativity constraints on them.

A :class:`TruncSeries` stores ``c_0, ..., c_N`` over one exact ring.  For a
normalized series ``c_1 = 1`` and the constant term is ``c_0 = 1/(2 a_0)``;
``a_0`` is only materialized where a normalization needs it.

The constraint functions evaluate the paper-style equations at a point:
``residual_P(f, n)`` is ``b_n - prod b_{p^e}`` for the normalized square
``b = a_0 f^2`` and ``residual_Q`` is the same for ``d = 2 a_0^3 f^4``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Sequence

import numpy as np

from .primepowers import default_table
from .rings import (
    QQ,
    FpElem,
    NotInvertibleError,
    PrimeField,
    Ring,
    RingError,
    RingMismatchError,
    ring_of,
    scalar_from_json,
    scalar_to_json,
)

__all__ = [
    "TruncSeries",
    "MultReport",
    "RankTriple",
    "series_mul",
    "substitute_power",
    "check_normalized_multiplicative",
    "is_multiplicative",
    "normalize",
    "normalized_power",
    "residual_P",
    "residual_Q",
    "residual_power",
    "composite_indices",
    "rank_matrices",
    "matrix_rank",
    "F_MATRIX",
    "MP_MATRIX",
    "MPP_MATRIX",
]


@dataclass(frozen=True, eq=False)
class TruncSeries:
    """Coefficients ``c_0..c_N`` of a power series in ``q`` modulo ``q^(N+1)``."""

    ring: Ring
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) < 2:
            raise ValueError("a truncated series needs N >= 1")

    @classmethod
    def from_coeffs(cls, coeffs: Iterable, ring: Ring | None = None) -> "TruncSeries":
        cs = list(coeffs)
        if ring is None:
            ring = _common_ring(cs)
        return cls(ring, tuple(ring(c) for c in cs))

    @classmethod
    def zero(cls, ring: Ring, N: int) -> "TruncSeries":
        return cls(ring, (ring.zero,) * (N + 1))

    @property
    def N(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k):
        return self.coeffs[k]

    def __len__(self):
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def truncate(self, N: int) -> "TruncSeries":
        if N > self.N:
            raise ValueError(f"cannot extend a series known to q^{self.N} up to q^{N}")
        return TruncSeries(self.ring, self.coeffs[: N + 1])

    def _check(self, other: "TruncSeries"):
        if other.ring != self.ring:
            raise RingMismatchError(f"{self.ring} vs {other.ring}")

    def __add__(self, other):
        if not isinstance(other, TruncSeries):
            c = self.ring(other)
            return TruncSeries(self.ring, (self.coeffs[0] + c,) + self.coeffs[1:])
        self._check(other)
        n = min(self.N, other.N) + 1
        return TruncSeries(self.ring, tuple(a + b for a, b in zip(self.coeffs[:n], other.coeffs[:n])))

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries(self.ring, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TruncSeries):
            return series_mul(self, other)
        c = self.ring(other)
        return TruncSeries(self.ring, tuple(x * c for x in self.coeffs))

    __rmul__ = __mul__

    def __pow__(self, m: int):
        if m < 1:
            raise ValueError("only positive powers of a truncated series are defined")
        result, base = None, self
        while m:
            if m & 1:
                result = base if result is None else series_mul(result, base)
            m >>= 1
            if m:
                base = series_mul(base, base)
        return result

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return self.ring == other.ring and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.ring, self.coeffs))

    def map(self, fn, ring: Ring) -> "TruncSeries":
        return TruncSeries(ring, tuple(fn(c) for c in self.coeffs))

    def to_json(self) -> dict:
        return {
            "schema": "multsq.series/1",
            "ring": self.ring.descriptor(),
            "N": self.N,
            "coefficients": [scalar_to_json(c) for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TruncSeries":
        ring = ring_from_descriptor(obj["ring"])
        return cls(ring, tuple(scalar_from_json(c, ring) for c in obj["coefficients"]))

    def __repr__(self):
        shown = ", ".join(str(c) for c in self.coeffs[:8])
        more = ", ..." if self.N >= 8 else ""
        return f"TruncSeries({self.ring}, N={self.N}, [{shown}{more}])"


def ring_from_descriptor(desc: dict) -> Ring:
    from .rings import QuadraticField, RationalFunctionField

    kind = desc["kind"]
    if kind == "QQ":
        return QQ
    if kind == "quadratic":
        return QuadraticField(desc["d"])
    if kind == "Fp":
        return PrimeField(desc["p"])
    if kind == "ratfunc_t":
        return RationalFunctionField(ring_from_descriptor(desc["base"]))
    raise RingError(f"unknown ring descriptor {desc!r}")


def _common_ring(cs: Sequence) -> Ring:
    rings = {ring_of(c) for c in cs}
    if len(rings) == 1:
        return rings.pop()
    non_q = rings - {QQ}
    if len(non_q) == 1:
        return non_q.pop()
    raise RingMismatchError(f"mixed coefficient rings {sorted(map(str, rings))}")


# ---------------------------------------------------------------------------
# Arithmetic
# ---------------------------------------------------------------------------


def series_mul(f: TruncSeries, g: TruncSeries) -> TruncSeries:
    """Cauchy product, truncated at the shorter of the two orders."""
    f._check(g)
    N = min(f.N, g.N)
    if isinstance(f.ring, PrimeField):
        p = f.ring.p
        a = np.fromiter((c.r for c in f.coeffs[: N + 1]), dtype=np.int64, count=N + 1)
        b = np.fromiter((c.r for c in g.coeffs[: N + 1]), dtype=np.int64, count=N + 1)
        if N * (p - 1) ** 2 < 2**62:
            prod = np.convolve(a, b)[: N + 1] % p
        else:
            prod = np.array([sum(int(a[i]) * int(b[n - i]) for i in range(n + 1)) % p
                             for n in range(N + 1)])
        return TruncSeries(f.ring, tuple(FpElem._raw(int(x), p) for x in prod))
    a, b = f.coeffs, g.coeffs
    zero = f.ring.zero
    out = []
    nz_a = [i for i in range(N + 1) if a[i]]
    for n in range(N + 1):
        acc = zero
        for i in nz_a:
            if i > n:
                break
            y = b[n - i]
            if y:
                acc = acc + a[i] * y
        out.append(acc)
    return TruncSeries(f.ring, tuple(out))


def substitute_power(f: TruncSeries, k: int) -> TruncSeries:
    """``f(q^k)`` at the same truncation order."""
    if k < 1:
        raise ValueError("k must be >= 1")
    zero = f.ring.zero
    out = [zero] * (f.N + 1)
    for j in range(f.N // k + 1):
        out[j * k] = f.coeffs[j]
    return TruncSeries(f.ring, tuple(out))


def substitute_neg(f: TruncSeries) -> TruncSeries:
    """``f(-q)``."""
    return TruncSeries(f.ring, tuple(c if n % 2 == 0 else -c for n, c in enumerate(f.coeffs)))


# ---------------------------------------------------------------------------
# Multiplicativity
# ---------------------------------------------------------------------------


@dataclass
class MultReport:
    normalized: bool
    violations: list[tuple[int, int]] = field(default_factory=list)

    @property
    def is_multiplicative(self) -> bool:
        return not self.violations

    @property
    def ok(self) -> bool:
        return self.normalized and not self.violations

    def __bool__(self):
        return self.ok


def _coprime_pairs(N: int):
    for m in range(2, N // 2 + 1):
        for n in range(m + 1, N // m + 1):
            if gcd(m, n) == 1:
                yield m, n


def check_normalized_multiplicative(f: TruncSeries, *, first_only: bool = False) -> MultReport:
    """Check ``c_1 = 1`` and ``c_mn = c_m c_n`` for coprime ``m, n > 1``, ``mn <= N``."""
    report = MultReport(normalized=bool(f.coeffs[1] == 1))
    c = f.coeffs
    for m, n in _coprime_pairs(f.N):
        if c[m * n] != c[m] * c[n]:
            report.violations.append((m, n))
            if first_only:
                break
    return report


def is_multiplicative(f: TruncSeries) -> bool:
    """Whether some scalar multiple of ``f`` is normalized multiplicative."""
    try:
        g = normalize(f)
    except NotInvertibleError:
        return False
    return check_normalized_multiplicative(g, first_only=True).ok


def _inv(x):
    if not x:
        raise NotInvertibleError("coefficient is zero")
    if isinstance(x, FpElem):
        return x.inverse()
    return 1 / x


def normalize(f: TruncSeries) -> TruncSeries:
    """``f / c_1``."""
    inv = _inv(f.coeffs[1])
    if f.coeffs[1] == 1:
        return f
    return f * inv


def normalized_power(f: TruncSeries, m: int) -> TruncSeries:
    """``f^m / (m c_0^(m-1))``, the normalization of ``f^m`` when ``c_1 = 1``.

    For ``m = 2`` this is ``a_0 f^2``; for ``m = 4`` it is ``2 a_0^3 f^4``.
    """
    if m < 2:
        raise ValueError("m must be >= 2")
    c0 = f.coeffs[0]
    scale = _inv(m * c0 ** (m - 1))
    return (f**m) * scale


def composite_indices(N: int, start: int = 6) -> list[int]:
    """Integers in ``[start, N]`` that are not prime powers (and not 1)."""
    tab = default_table(N)
    return [n for n in range(max(start, 2), N + 1) if not tab.is_prime_power(n)]


def _power_residual(b: TruncSeries, n: int):
    tab = default_table(n)
    if n > b.N:
        raise ValueError(f"index {n} beyond truncation {b.N}")
    if n < 2 or tab.is_prime_power(n):
        raise ValueError(f"{n} is a prime power; no constraint")
    prod = b.ring.one
    for pe in tab.prime_power_factors(n):
        prod = prod * b.coeffs[pe]
    return b.coeffs[n] - prod


def residual_power(f: TruncSeries, n: int, m: int):
    """``e_n - prod e_{p^e}`` for the normalized ``m``-th power ``e`` of ``f``."""
    return _power_residual(normalized_power(f.truncate(max(n, 1)) if n < f.N else f, m), n)


def residual_P(f: TruncSeries, n: int):
    """Constraint for ``f^2`` at the non-prime-power index ``n``; zero iff satisfied."""
    return residual_power(f, n, 2)


def residual_Q(f: TruncSeries, n: int):
    """Constraint for ``f^4`` at the non-prime-power index ``n``; zero iff satisfied."""
    return residual_power(f, n, 4)


def power_residuals(f: TruncSeries, m: int, N: int | None = None) -> dict[int, object]:
    """All residuals for the normalized ``m``-th power at composite ``n <= N``."""
    N = f.N if N is None else N
    e = normalized_power(f.truncate(N), m)
    return {n: _power_residual(e, n) for n in composite_indices(N)}


# ---------------------------------------------------------------------------
# Rank matrices
# ---------------------------------------------------------------------------

# Entries: an int index k means a_k, "1" and "0" are the constants.
F_MATRIX = (
    (2, 4, 5, 6, 8, 9, 10, 11, 12),
    ("1", 3, 4, 5, 7, 8, 9, 10, 11),
    ("0", "1", 2, 3, 5, 6, 7, 8, 9),
    ("0", "0", "0", "0", "1", 2, 3, 4, 5),
)
MP_MATRIX = (
    (2, 3, 4, 5, 7, 8, 9, 11, 13, 14),
    ("1", 2, 3, 4, 6, 7, 8, 10, 12, 13),
    ("0", "0", "0", "0", "1", 2, 3, 5, 7, 8),
    ("0", "0", "0", "0", "0", "0", "0", "1", 3, 4),
    ("0", "0", "0", "0", "0", "0", "0", "0", "1", 2),
)
MPP_MATRIX = (
    (2, 3, 5, 6, 7, 8, 9, 11, 13, 14, 15),
    ("1", 2, 4, 5, 6, 7, 8, 10, 12, 13, 14),
    ("0", "0", "1", 2, 3, 4, 5, 7, 9, 10, 11),
    ("0", "0", "0", "0", "0", "0", "0", "1", 3, 4, 5),
    ("0", "0", "0", "0", "0", "0", "0", "0", "1", 2, 3),
)


@dataclass(frozen=True)
class RankTriple:
    rank_F: int
    rank_Mp: int
    rank_Mpp: int

    @property
    def full(self) -> bool:
        return (self.rank_F, self.rank_Mp, self.rank_Mpp) == (4, 5, 5)


def matrix_rank(rows: list[list]) -> int:
    """Rank over a field by exact Gaussian elimination."""
    m = [list(r) for r in rows]
    rank = 0
    ncols = len(m[0]) if m else 0
    for col in range(ncols):
        pivot = next((i for i in range(rank, len(m)) if m[i][col]), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        inv = _inv(m[rank][col])
        for i in range(rank + 1, len(m)):
            if m[i][col]:
                factor = m[i][col] * inv
                m[i] = [x - factor * y for x, y in zip(m[i], m[rank])]
        rank += 1
    return rank


def _materialize(template, f: TruncSeries):
    one, zero = f.ring.one, f.ring.zero

    def entry(e):
        if e == "1":
            return one
        if e == "0":
            return zero
        return f.coeffs[e]

    return [[entry(e) for e in row] for row in template]


def rank_matrices(f: TruncSeries) -> RankTriple:
    """Ranks of the three coefficient matrices built from ``a_2..a_15``."""
    if f.N < 15:
        raise ValueError("rank matrices need coefficients through q^15")
    return RankTriple(
        matrix_rank(_materialize(F_MATRIX, f)),
        matrix_rank(_materialize(MP_MATRIX, f)),
        matrix_rank(_materialize(MPP_MATRIX, f)),
    )
