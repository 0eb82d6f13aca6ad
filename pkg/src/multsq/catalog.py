"""Known normalized multiplicative series whose squares are multiplicative.

Theta series come from direct enumeration of norm forms, Eisenstein series
from divisor sums, and the rational solutions from their periodic
coefficient patterns.  Parametric families are affine in the parameter,
``f = f0 + t*f1``, and :func:`family_parts` exposes the two pieces so that
callers (the mod-p classifier in particular) can specialize ``t`` cheaply.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from math import isqrt

import numpy as np

from .rings import (
    QQ,
    FpElem,
    PrimeField,
    QuadraticField,
    RatFuncT,
    RationalFunctionField,
    Ring,
    RingError,
    ring_of,
)
from .series import TruncSeries, substitute_neg, substitute_power

__all__ = [
    "LatticeId",
    "SolutionId",
    "FamilyParts",
    "T",
    "theta_series",
    "eisenstein",
    "delta_series",
    "sigma",
    "family_parts",
    "known_solution",
    "sign_flip",
    "match_divisor_combination",
    "printed_ix_prime_parts",
    "EISENSTEIN_GAMMA",
    "PARAMETRIC_IDS",
    "ALL_IDS",
]


class LatticeId(Enum):
    Z = "Z"
    Zi = "Zi"
    Zzeta3 = "Zzeta3"
    Ztau7 = "Ztau7"
    Zsqrtm2 = "Zsqrtm2"
    Hurwitz = "Hurwitz"
    E8 = "E8"

    @property
    def units(self) -> int:
        return _UNITS[self]

    @property
    def form(self) -> tuple[int, int, int] | None:
        """Binary form ``(a, b, c)`` for ``a x^2 + b xy + c y^2``; ``(1,0,0)`` for Z."""
        return _FORMS.get(self)


_UNITS = {
    LatticeId.Z: 2,
    LatticeId.Zi: 4,
    LatticeId.Zzeta3: 6,
    LatticeId.Ztau7: 2,
    LatticeId.Zsqrtm2: 2,
    LatticeId.Hurwitz: 24,
    LatticeId.E8: 240,
}
_FORMS = {
    LatticeId.Z: (1, 0, 0),
    LatticeId.Zi: (1, 0, 1),
    LatticeId.Zzeta3: (1, 1, 1),
    LatticeId.Ztau7: (1, 1, 2),
    LatticeId.Zsqrtm2: (1, 0, 2),
}


# ---------------------------------------------------------------------------
# Representation counts
# ---------------------------------------------------------------------------


def _binary_counts(a: int, b: int, c: int, N: int) -> np.ndarray:
    if c == 0:
        x = np.arange(-isqrt(N // a) - 1, isqrt(N // a) + 2)
        vals = a * x * x
        return np.bincount(vals[vals <= N], minlength=N + 1)
    disc = 4 * a * c - b * b
    ybound = isqrt(4 * a * N // disc) + 1
    xbound = isqrt(4 * c * N // disc) + 1
    x = np.arange(-xbound, xbound + 1)[:, None]
    y = np.arange(-ybound, ybound + 1)[None, :]
    vals = (a * x * x + b * x * y + c * y * y).ravel()
    return np.bincount(vals[vals <= N], minlength=N + 1)


def _coordinate_counts(values: np.ndarray, limit: int, dims: int) -> list[int]:
    """Number of ``dims``-tuples from ``values`` with square-sum ``m`` for ``m <= limit``."""
    one = [0] * (limit + 1)
    for v in values.tolist():
        s = v * v
        if s <= limit:
            one[s] += 1
    support = [(j, m) for j, m in enumerate(one) if m]
    acc = [1] + [0] * limit
    for _ in range(dims):
        nxt = [0] * (limit + 1)
        for i, ai in enumerate(acc):
            if ai:
                for j, m in support:
                    if i + j > limit:
                        break
                    nxt[i + j] += ai * m
        acc = nxt
    return acc


def _hurwitz_counts(N: int) -> list[int]:
    # doubled coordinates, all even or all odd, square-sum 4n
    limit = 4 * N
    b = isqrt(limit) + 1
    even = _coordinate_counts(np.arange(-b - (b % 2), b + 1, 2), limit, 4)
    odd = _coordinate_counts(np.arange(-b - 1 + (b % 2), b + 1, 2), limit, 4)
    return [even[4 * n] + odd[4 * n] for n in range(N + 1)]


def theta_series(L: LatticeId | str, N: int) -> TruncSeries:
    """``sum q^{|v|^2}`` over the lattice, divided by the number of norm-1 vectors."""
    L = LatticeId(L) if isinstance(L, str) else L
    if N < 1:
        raise ValueError("N must be >= 1")
    if L is LatticeId.E8:
        return eisenstein(4, N) * Fraction(1, 240)
    if L is LatticeId.Hurwitz:
        counts = _hurwitz_counts(N)
    else:
        counts = _binary_counts(*L.form, N).tolist()
    u = L.units
    return TruncSeries(QQ, tuple(Fraction(int(r), u) for r in counts))


# ---------------------------------------------------------------------------
# Eisenstein series and Delta
# ---------------------------------------------------------------------------

EISENSTEIN_GAMMA = {
    2: Fraction(-24),
    4: Fraction(240),
    6: Fraction(-504),
    8: Fraction(480),
    10: Fraction(-264),
    12: Fraction(65520, 691),
}


@lru_cache(maxsize=32)
def _sigma_table(k: int, N: int) -> tuple[int, ...]:
    s = [0] * (N + 1)
    for d in range(1, N + 1):
        dk = d**k
        for m in range(d, N + 1, d):
            s[m] += dk
    return tuple(s)


def sigma(k: int, n: int) -> int:
    """Sum of ``d^k`` over the divisors of ``n``."""
    return _sigma_table(k, n)[n]


def eisenstein(k: int, N: int) -> TruncSeries:
    """``E_k = 1 + gamma_k sum sigma_{k-1}(n) q^n`` for even ``2 <= k <= 12``."""
    if k not in EISENSTEIN_GAMMA:
        raise ValueError(f"unsupported weight {k}")
    g = EISENSTEIN_GAMMA[k]
    s = _sigma_table(k - 1, N)
    return TruncSeries(QQ, (Fraction(1),) + tuple(g * s[n] for n in range(1, N + 1)))


def delta_series(N: int) -> TruncSeries:
    """``q prod (1-q^n)^24`` via the logarithmic-derivative recurrence."""
    if N < 1:
        raise ValueError("N must be >= 1")
    s1 = _sigma_table(1, N)
    e = [1] + [0] * (N - 1)
    for n in range(1, N):
        acc = sum(s1[k] * e[n - k] for k in range(1, n + 1))
        e[n] = -24 * acc // n
    return TruncSeries(QQ, (Fraction(0),) + tuple(Fraction(x) for x in e))


# ---------------------------------------------------------------------------
# Solution catalog
# ---------------------------------------------------------------------------


class SolutionId(str, Enum):
    i = "i"
    ii = "ii"
    iii = "iii"
    iv = "iv"
    v = "v"
    vi = "vi"
    vii = "vii"
    viii = "viii"
    ix = "ix"
    x = "x"
    i_p = "i'"
    ii_p = "ii'"
    iv_p = "iv'"
    ix_p = "ix'"
    x_p = "x'"
    xi = "xi"
    xii = "xii"
    xiii = "xiii"
    xiii_p = "xiii'"
    xiv = "xiv"
    xiv_p = "xiv'"

    def __str__(self):
        return self.value

    @property
    def parametric(self) -> bool:
        return self in PARAMETRIC_IDS

    @property
    def radicand(self) -> int | None:
        return _RADICANDS.get(self)


ALL_IDS = tuple(SolutionId)
PARAMETRIC_IDS = frozenset(
    SolutionId(s) for s in ("iii", "v", "vi", "vii", "viii", "ix", "ix'", "xi", "xii")
)
_RADICANDS = {
    SolutionId.ix: -3,
    SolutionId.ix_p: -3,
    SolutionId.x: -2,
    SolutionId.x_p: -2,
}

T = "t"
"""Sentinel requesting the parameter as an indeterminate."""


@dataclass(frozen=True)
class FamilyParts:
    """``f = f0 + t*f1`` over ``base``; ``f1`` is ``None`` for non-parametric ids."""

    id: SolutionId
    f0: TruncSeries
    f1: TruncSeries | None

    @property
    def base(self) -> Ring:
        return self.f0.ring


def _lift(f: TruncSeries, ring: Ring) -> TruncSeries:
    if f.ring == ring:
        return f
    return f.map(ring, ring)


def _periodic(N: int, c0, pattern, weight=lambda n: 1) -> TruncSeries:
    L = len(pattern)
    cs = [Fraction(c0)] + [Fraction(pattern[(n - 1) % L] * weight(n)) for n in range(1, N + 1)]
    return TruncSeries(QQ, tuple(cs))


def _ix_parts(N: int, printed_prime: bool = False) -> tuple[TruncSeries, TruncSeries]:
    K = QuadraticField(-3)
    s = K.gen
    th = _lift(theta_series(LatticeId.Zi, N), K)
    sub = lambda k: substitute_power(th, k)
    if printed_prime:
        third = -s * substitute_power(substitute_neg(th), 3)
    else:
        third = s * sub(3)
    f0 = th - s * sub(2) + third + sub(6) * 3
    f1 = sub(2) + s * sub(6)
    return f0, f1


@lru_cache(maxsize=256)
def family_parts(sid: SolutionId | str, N: int) -> FamilyParts:
    """The affine pieces of a catalog entry truncated at ``q^N``."""
    sid = SolutionId(sid)
    th = lambda L: theta_series(L, N)
    f1 = None
    if sid is SolutionId.i:
        f0 = th(LatticeId.E8)
    elif sid is SolutionId.ii:
        f0 = (th(LatticeId.Zzeta3) ** 2) * 3
    elif sid is SolutionId.iv:
        f0 = th(LatticeId.Ztau7)
    elif sid is SolutionId.x:
        K = QuadraticField(-2)
        g = _lift(th(LatticeId.Zzeta3), K)
        f0 = g + substitute_power(g, 2) * K.gen
    elif sid in (SolutionId.i_p, SolutionId.ii_p, SolutionId.iv_p, SolutionId.x_p):
        f0 = sign_flip(family_parts(SolutionId(sid.value[:-1]), N).f0)
    elif sid in (SolutionId.iii, SolutionId.v, SolutionId.vi, SolutionId.vii, SolutionId.viii):
        L, k = {
            SolutionId.iii: (LatticeId.Hurwitz, 2),
            SolutionId.v: (LatticeId.Zi, 2),
            SolutionId.vi: (LatticeId.Zzeta3, 4),
            SolutionId.vii: (LatticeId.Z, 4),
            SolutionId.viii: (LatticeId.Zsqrtm2, 2),
        }[sid]
        f0 = th(L)
        f1 = substitute_power(f0, k)
    elif sid is SolutionId.ix:
        f0, f1 = _ix_parts(N)
    elif sid is SolutionId.ix_p:
        # -f(-q) of (ix); the alternative closed form with theta(-q^3) in the
        # third term is not multiplicative (c_6 != c_2 c_3), see printed_ix_prime_parts
        base = family_parts(SolutionId.ix, N)
        f0, f1 = sign_flip(base.f0), sign_flip(base.f1)
    elif sid is SolutionId.xi:
        f0 = TruncSeries(QQ, (Fraction(0), Fraction(1)) + (Fraction(0),) * (N - 1))
        f1 = TruncSeries(QQ, (Fraction(1),) + (Fraction(0),) * N)
    elif sid is SolutionId.xii:
        f0 = _periodic(N, 0, (1, 0))
        f1 = _periodic(N, 1, (0, 2))
    elif sid is SolutionId.xiii:
        f0 = _periodic(N, Fraction(1, 6), (1, -1, 0))
    elif sid is SolutionId.xiii_p:
        f0 = _periodic(N, Fraction(-1, 6), (1, 1, 0, -1, -1, 0))
    elif sid is SolutionId.xiv:
        f0 = _periodic(N, Fraction(1, 12), (1,), weight=lambda n: n)
    elif sid is SolutionId.xiv_p:
        f0 = _periodic(N, Fraction(-1, 12), (1, -1), weight=lambda n: n)
    else:  # pragma: no cover
        raise AssertionError(sid)
    return FamilyParts(sid, f0, f1)


def printed_ix_prime_parts(N: int) -> tuple[TruncSeries, TruncSeries]:
    """``theta(q) - s theta(q^2) - s theta(-q^3) + 3 theta(q^6) + t(theta(q^2) + s theta(q^6))``.

    Kept for comparison only; it is not a multiplicative series.
    """
    return _ix_parts(N, printed_prime=True)


def _param_ring(base: Ring, param) -> tuple[Ring, object]:
    if isinstance(param, str):
        if param != T:
            raise ValueError(f"unknown symbolic parameter {param!r}")
        R = RationalFunctionField(base)
        return R, R.gen
    if isinstance(param, RatFuncT):
        R = param.field
        if R.base != base:
            raise RingError(f"parameter over {R.base} for a family over {base}")
        return R, param
    if isinstance(param, FpElem):
        raise RingError("reduce over Q first; mod-p families are built by the search module")
    pr = ring_of(param)
    if pr == QQ:
        return base, base(param)
    if isinstance(base, QuadraticField) and pr != base:
        raise RingError(f"parameter in {pr} for a family over {base}")
    return pr, pr(param)


def known_solution(sid: SolutionId | str, param=None, N: int = 50) -> TruncSeries:
    """Exact truncated expansion of a catalog entry.

    ``param`` must be given exactly for the parametric ids; pass :data:`T`
    for the family over the rational function field in ``t``.
    """
    parts = family_parts(SolutionId(sid), N)
    if parts.f1 is None:
        if param is not None:
            raise ValueError(f"solution ({parts.id}) takes no parameter")
        return parts.f0
    if param is None:
        raise ValueError(f"solution ({parts.id}) needs a parameter")
    R, t = _param_ring(parts.base, param)
    f = _lift(parts.f0, R) + _lift(parts.f1, R) * t
    if not f.coeffs[0]:
        raise ValueError(f"parameter {param} makes the constant term vanish")
    return f


def sign_flip(f: TruncSeries) -> TruncSeries:
    """``-f(-q)``: negate every even-index coefficient, including the constant."""
    return TruncSeries(f.ring, tuple(-c if n % 2 == 0 else c for n, c in enumerate(f.coeffs)))


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def match_divisor_combination(target: TruncSeries, g: TruncSeries, divisors_of: int):
    """Find ``c_d`` with ``target = sum_{d | divisors_of} c_d g(q^d)``, or ``None``."""
    if not isinstance(target.ring, PrimeField) or target.ring != g.ring:
        raise RingError("both series must live over the same F_p")
    if not 1 <= divisors_of <= 24:
        raise ValueError("divisors_of must be in [1, 24]")
    F = target.ring
    N = min(target.N, g.N)
    ds = _divisors(divisors_of)
    cols = [substitute_power(g.truncate(N), d) for d in ds]
    rows = [[col.coeffs[n] for col in cols] + [target.coeffs[n]] for n in range(N + 1)]
    # row reduction over F_p on the augmented matrix
    piv_cols = []
    r = 0
    for c in range(len(ds)):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = rows[r][c].inverse()
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                fac = rows[i][c]
                rows[i] = [x - fac * y for x, y in zip(rows[i], rows[r])]
        piv_cols.append(c)
        r += 1
    if any(row[-1] for row in rows[r:]):
        return None
    sol = {d: F.zero for d in ds}
    for i, c in enumerate(piv_cols):
        sol[ds[c]] = rows[i][-1]
    return sol
