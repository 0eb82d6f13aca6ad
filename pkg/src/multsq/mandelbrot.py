"""Mandelbrot polynomials and the numerics of their generating function.

``M_1 = y`` and for ``n > 1``::

    M_n = -1/2 sum_{i=1}^{n-1} M_i M_{n-i}  (+ 1/2 M_{n/2} when n is even)

so that ``g(z) = 1 + sum M_n(c) z^n`` satisfies ``g(z)^2 = g(z^2) + 2cz``.
Exact work happens on integer polynomials scaled by ``2^(2n)`` (all
denominators are powers of two); numerics use complex doubles.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .rings import QQ, Poly, RatFuncT, RationalFunctionField, p_valuation
from .series import TruncSeries, series_mul, substitute_power

__all__ = [
    "MandelPoly",
    "NewtonPolygon",
    "IterationState",
    "RootInfo",
    "BranchPointError",
    "ConvergenceError",
    "mandel_poly",
    "generating_identity_check",
    "leading_coeff",
    "newton_polygon",
    "newton_polygon_integrality",
    "common_root_check",
    "iterate_I",
    "radius",
    "radius_limit",
    "eval_g",
    "taylor_coefficients_g",
    "roots_numeric",
    "escape_test",
    "root_locus_export",
    "zero_root_multiplicity",
]


class BranchPointError(ArithmeticError):
    pass


class ConvergenceError(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# Exact polynomials
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _scaled(n: int) -> tuple[int, ...]:
    """Integer coefficients of ``2^(2n) M_n``, index = power of y."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return (0, 4)
    acc = [0] * (n + 1)
    for i in range(1, (n + 1) // 2):
        a, b = _scaled(i), _scaled(n - i)
        for ea, ca in enumerate(a):
            if ca:
                for eb, cb in enumerate(b):
                    acc[ea + eb] += 2 * ca * cb
    if n % 2 == 0:
        h = _scaled(n // 2)
        for ea, ca in enumerate(h):
            if ca:
                for eb, cb in enumerate(h):
                    acc[ea + eb] += ca * cb
        # the + 1/2 M_{n/2} term, scaled by 2^(2n) = 2^n * 2^(2(n/2))
        for e, c in enumerate(h):
            acc[e] -= c << n
    # acc holds -2 * 2^(2n) M_n
    assert all(x % 2 == 0 for x in acc)
    return tuple(-(x // 2) for x in acc)


@dataclass(frozen=True)
class MandelPoly:
    n: int
    coeffs: tuple[Fraction, ...]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lead(self) -> Fraction:
        return self.coeffs[-1]

    def __call__(self, y):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * y + c
        return acc

    def as_poly(self) -> Poly:
        return Poly(self.coeffs, QQ)

    def __str__(self):
        terms = []
        for e, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}*y^{e}" if e > 1 else (f"{c}*y" if e == 1 else str(c)))
        return " + ".join(reversed(terms)) or "0"


@lru_cache(maxsize=None)
def mandel_poly(n: int) -> MandelPoly:
    """Exact ``M_n`` with rational coefficients of ``y^0 .. y^n``."""
    scale = 1 << (2 * n)
    return MandelPoly(n, tuple(Fraction(c, scale) for c in _scaled(n)))


def leading_coeff(n: int) -> Fraction:
    """``(-1)^(n-1) (2n-3)!! / n!``."""
    if n < 2:
        raise ValueError("n must be >= 2")
    dfact = math.prod(range(1, 2 * n - 2, 2))
    return Fraction((-1) ** (n - 1) * dfact, math.factorial(n))


def zero_root_multiplicity(n: int) -> int:
    c = mandel_poly(n).coeffs
    return next(e for e, x in enumerate(c) if x)


def generating_identity_check(N: int) -> bool:
    """Check ``G(z)^2 = G(z^2) + 2cz`` mod ``z^(N+1)`` with ``M_k`` as polynomials in ``c``."""
    if N < 2:
        raise ValueError("N must be >= 2")
    R = RationalFunctionField(QQ)
    coeffs = [R.one]
    for k in range(1, N + 1):
        coeffs.append(RatFuncT._poly(mandel_poly(k).as_poly()))
    G = TruncSeries(R, tuple(coeffs))
    lhs = series_mul(G, G)
    rhs = substitute_power(G, 2)
    two_cz = [R.zero] * (N + 1)
    two_cz[1] = R.gen * 2
    rhs = rhs + TruncSeries(R, tuple(two_cz))
    return lhs == rhs


# ---------------------------------------------------------------------------
# Newton polygons and common roots
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NewtonPolygon:
    p: int
    points: tuple[tuple[int, int], ...]
    vertices: tuple[tuple[int, int], ...]
    slopes: tuple[Fraction, ...]

    @property
    def root_valuations(self) -> tuple[Fraction, ...]:
        """One entry per root (with multiplicity), the negated slopes."""
        out = []
        for (x0, _), (x1, _), s in zip(self.vertices, self.vertices[1:], self.slopes):
            out.extend([-s] * (x1 - x0))
        return tuple(out)


def newton_polygon(coeffs: Sequence[Fraction], p: int) -> NewtonPolygon:
    """Lower convex hull of ``(k, v_p(a_k))`` over nonzero coefficients."""
    pts = [(k, p_valuation(c, p)) for k, c in enumerate(coeffs) if c]
    hull: list[tuple[int, int]] = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point unless it lies strictly below the chord
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    slopes = tuple(Fraction(y2 - y1, x2 - x1) for (x1, y1), (x2, y2) in zip(hull, hull[1:]))
    return NewtonPolygon(p, tuple(pts), tuple(hull), slopes)


def newton_polygon_integrality(n: int, p: int) -> tuple[bool, NewtonPolygon]:
    """Whether every nonzero root of ``M_n`` is p-adically integral.

    Zero roots are divided out first; a root has valuation ``-slope`` so
    integrality means no hull segment has positive slope.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    c = mandel_poly(n).coeffs
    v = zero_root_multiplicity(n)
    poly = newton_polygon(c[v:], p)
    return all(s <= 0 for s in poly.slopes), poly


def _radical_factors(g: Poly) -> tuple[int, int, Poly]:
    """Split ``g = y^a (y-1)^b h`` with ``h(0) h(1) != 0``."""
    y = Poly((QQ.zero, QQ.one), QQ)
    y1 = Poly((-QQ.one, QQ.one), QQ)
    a = b = 0
    while g.degree > 0 and g(QQ.zero) == 0:
        g, _ = g.divmod(y)
        a += 1
    while g.degree > 0 and g(QQ.one) == 0:
        g, _ = g.divmod(y1)
        b += 1
    return a, b, g


def common_root_check(i: int, j: int) -> set[Fraction]:
    """Common roots of ``M_i`` and ``M_j``, via their gcd over Q.

    Raises ``AssertionError`` if the gcd has a root outside ``{0, 1}``.
    """
    if not 1 <= i < j:
        raise ValueError("need 1 <= i < j")
    g = mandel_poly(i).as_poly().gcd(mandel_poly(j).as_poly())
    a, b, rest = _radical_factors(g)
    assert rest.degree == 0, f"gcd(M_{i}, M_{j}) has roots outside {{0, 1}}: {g}"
    out = set()
    if a:
        out.add(Fraction(0))
    if b:
        out.add(Fraction(1))
    return out


def gcd_multiplicities(i: int, j: int) -> tuple[int, int]:
    """Multiplicities of ``y`` and ``y-1`` in ``gcd(M_i, M_j)``."""
    g = mandel_poly(i).as_poly().gcd(mandel_poly(j).as_poly())
    a, b, _ = _radical_factors(g)
    return a, b


# ---------------------------------------------------------------------------
# Iteration, radii, nested square roots
# ---------------------------------------------------------------------------

_SWITCH = 1e150


@dataclass
class IterationState:
    """``I_1 = d``, ``I_k = I_{k-1}^2 + d``; ``d = -2c`` when built by :func:`radius`.

    ``values`` holds the iterates while representable; ``log_abs`` holds
    ``log |I_k|`` throughout, continued as ``2 log |I_{k-1}|`` once the
    iterate exceeds ``1e150`` (the dropped term is below double precision).
    """

    d: complex
    values: list[complex] = field(default_factory=list)
    log_abs: list[float] = field(default_factory=list)

    @property
    def c(self) -> complex:
        return -self.d / 2

    @property
    def n(self) -> int:
        return len(self.log_abs)

    @property
    def overflowed(self) -> bool:
        return len(self.values) < len(self.log_abs)

    def radii(self) -> list[float]:
        """``R_{k,c}`` for ``k = 1..n``."""
        out = []
        sup = -math.inf
        for k, la in enumerate(self.log_abs, start=1):
            sup = max(sup, la)
            out.append(math.exp(-sup * 2.0 ** (1 - k)))
        return out


def iterate_I(d: complex, n: int) -> IterationState:
    if n < 1:
        raise ValueError("n must be >= 1")
    d = complex(d)
    st = IterationState(d)
    z = d
    big = False
    for _ in range(n):
        if not big:
            st.values.append(z)
            st.log_abs.append(math.log(abs(z)) if z else -math.inf)
            if abs(z) > _SWITCH:
                big = True
            else:
                z = z * z + d
        else:
            st.log_abs.append(2 * st.log_abs[-1])
    return st


def radius(c: complex, n: int) -> float:
    """``R_{n,c} = (sup_{k<=n} |I_k(-2c)|)^(-2^(1-n))``."""
    st = iterate_I(-2 * complex(c), n)
    r = st.radii()[-1]
    if r == 0 or math.isnan(r):
        raise ConvergenceError(f"iterates at c={c} diverged numerically")
    return r


def radius_limit(c: complex, n: int = 60) -> float:
    """``R_c`` estimate: ``min(R_{n,c}, 1)`` at a large ``n``."""
    return min(radius(c, n), 1.0)


def eval_g(c: complex, n: int, z: complex, tol: float = 1e-12) -> complex:
    """``g_{n,c}(z)`` by nested principal square roots.

    Raises :class:`BranchPointError` if a radicand comes within ``tol`` of 0.
    """
    c, z = complex(c), complex(z)
    if n == 0:
        return 1 + 0j
    ws = [z]
    for _ in range(n - 1):
        ws.append(ws[-1] * ws[-1])
    g = 1 + 0j
    for w in reversed(ws):
        arg = g + 2 * c * w
        if abs(arg) < tol:
            raise BranchPointError(f"radicand {arg} near zero at z={w}")
        g = cmath.sqrt(arg)
    return g


def taylor_coefficients_g(c: complex, n: int, kmax: int, r: float | None = None,
                          samples: int = 256) -> np.ndarray:
    """Coefficients ``0..kmax`` of ``g_{n,c}`` by a discrete Cauchy integral.

    Samples ``g`` on the circle ``|z| = r`` (default ``R_{n,c}/4``) and
    applies an FFT; aliasing decays like ``(r/R)^samples``.
    """
    if r is None:
        r = radius(c, max(n, 1)) / 4
    theta = 2 * np.pi * np.arange(samples) / samples
    pts = r * np.exp(1j * theta)
    vals = np.array([eval_g(c, n, z) for z in pts])
    coef = np.fft.fft(vals) / samples
    return np.array([coef[k] / r**k for k in range(kmax + 1)])


# ---------------------------------------------------------------------------
# Roots and escape
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RootInfo:
    root: complex
    residual: float
    dist_to_quarter: float


def _horner(coeffs_hi_first: np.ndarray, z: np.ndarray) -> np.ndarray:
    acc = np.zeros_like(z)
    for c in coeffs_hi_first:
        acc = acc * z + c
    return acc


def _durand_kerner(coeffs: list[float], iters: int, tol: float) -> np.ndarray:
    # coeffs low -> high; monic normalization for the update
    a = np.array(coeffs[::-1], dtype=complex)
    a = a / a[0]
    m = len(a) - 1
    k = np.arange(m)
    z = 0.25 + 1.2 * np.exp(1j * (2 * np.pi * k / m + 0.4))
    for _ in range(iters):
        pz = _horner(a, z)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        step = pz / np.prod(diff, axis=1)
        z = z - step
        if np.max(np.abs(step)) < 1e-16 * max(1.0, np.max(np.abs(z))):
            break
    return z


def roots_numeric(n: int, iters: int = 500) -> list[RootInfo]:
    """All roots of ``M_n`` (zero with its multiplicity first), with residuals.

    Nonzero roots come from simultaneous (Durand-Kerner) iteration on
    ``M_n / y^v`` started on the circle ``|y - 1/4| = 1.2``, followed by a
    few Newton polishing steps.  Raises :class:`ConvergenceError` if some
    residual exceeds ``1e-8 * max |coefficient|``.
    """
    if not 2 <= n <= 64:
        raise ValueError("n must be in [2, 64]")
    mp = mandel_poly(n)
    v = zero_root_multiplicity(n)
    cf = [float(x) for x in mp.coeffs]
    reduced = cf[v:]
    z = _durand_kerner(reduced, iters, 0.0)
    hi = np.array(cf[::-1], dtype=complex)
    dhi = np.array([e * cf[e] for e in range(len(cf) - 1, 0, -1)], dtype=complex)
    red_hi = np.array(reduced[::-1], dtype=complex)
    red_d = np.array([e * reduced[e] for e in range(len(reduced) - 1, 0, -1)], dtype=complex)
    for _ in range(3):
        z = z - _horner(red_hi, z) / _horner(red_d, z)
    scale = max(abs(x) for x in cf)
    res = np.abs(_horner(hi, z))
    bad = res > 1e-8 * scale
    if np.any(bad):
        raise ConvergenceError(f"M_{n}: {int(bad.sum())} roots with residual above tolerance")
    out = [RootInfo(0j, 0.0, 0.25) for _ in range(v)]
    order = sorted(range(len(z)), key=lambda i: (round(z[i].real, 12), round(z[i].imag, 12)))
    for i in order:
        out.append(RootInfo(complex(z[i]), float(res[i]), float(abs(z[i] - 0.25))))
    del dhi
    return out


def escape_test(c: complex, max_iter: int) -> int | None:
    """First ``k`` with ``|z_k| > 2`` for ``z -> z^2 + c`` from 0, or ``None``.

    ``None`` means bounded through ``max_iter`` iterations; it does not
    certify membership.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    c = complex(c)
    z = 0j
    for k in range(1, max_iter + 1):
        z = z * z + c
        if abs(z) > 2:
            return k
    return None


def root_locus_export(n_max: int, max_iter: int = 1000) -> list[dict]:
    """Rows ``(n, root, -2 root, escape iteration or -1, |root - 1/4|)`` for nonzero roots."""
    if n_max > 64:
        raise ValueError("n_max must be <= 64")
    rows = []
    for n in range(2, n_max + 1):
        for info in roots_numeric(n):
            if info.root == 0:
                continue
            w = -2 * info.root
            k = escape_test(w, max_iter)
            rows.append({
                "n": n,
                "root": info.root,
                "minus2r": w,
                "escape_iter": -1 if k is None else k,
                "dist_to_quarter": info.dist_to_quarter,
            })
    return rows
