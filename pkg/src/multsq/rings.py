"""Exact scalar rings.

Four kinds of scalar show up in the computations:

* rationals, backed by :class:`fractions.Fraction` (ints are accepted too),
* elements ``a + b*sqrt(d)`` of an imaginary or real quadratic field (:class:`QuadElem`),
* residues modulo an odd prime (:class:`FpElem`),
* rational functions in a parameter ``t`` over the rationals or a quadratic
  field (:class:`RatFuncT`).

Every value is immutable.  A *ring descriptor* (:class:`RationalField`,
:class:`QuadraticField`, :class:`PrimeField`, :class:`RationalFunctionField`)
carries the constants and coercions needed by series code, and
:func:`ring_of` recovers the descriptor of any scalar at runtime.
"""
from __future__ import annotations

import math

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Integral

from sympy import isprime

__all__ = [
    "RingError",
    "RingMismatchError",
    "NotInvertibleError",
    "QuadElem",
    "FpElem",
    "Poly",
    "RatFuncT",
    "RationalField",
    "QuadraticField",
    "PrimeField",
    "RationalFunctionField",
    "QQ",
    "ring_of",
    "ring_add",
    "ring_mul",
    "ring_neg",
    "ring_invert",
    "sqrt_in_fp",
    "reduce_mod_p",
    "p_valuation",
    "scalar_to_json",
    "scalar_from_json",
    "is_squarefree",
]


class RingError(ValueError):
    """Base class for ring-level failures."""


class RingMismatchError(RingError, TypeError):
    """Operands live in different rings (different p, different d, ...)."""


class NotInvertibleError(RingError, ZeroDivisionError):
    """Inversion of zero or of a non-unit."""


def is_squarefree(n: int) -> bool:
    n = abs(n)
    if n == 0:
        return False
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        k += 1
    return True


@lru_cache(maxsize=None)
def _check_odd_prime(p: int) -> None:
    if p == 2:
        raise RingError("p = 2 is not supported: 1/(2 a_0) has no meaning in characteristic 2")
    if p < 2 or not isprime(p):
        raise RingError(f"modulus {p} is not an odd prime")


def _is_rational(x) -> bool:
    return isinstance(x, (Integral, Fraction)) and not isinstance(x, bool)


# ---------------------------------------------------------------------------
# Quadratic field elements
# ---------------------------------------------------------------------------


class QuadElem:
    """``a + b*sqrt(d)`` with rational ``a``, ``b`` and squarefree ``d``.

    ``d`` must already be squarefree; ``QuadElem(0, 1, -8)`` is rejected
    rather than rewritten as ``2*sqrt(-2)``.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b, d: int):
        if not isinstance(d, Integral) or d == 0 or d == 1 or not is_squarefree(int(d)):
            raise RingError(f"radicand {d!r} is not a squarefree integer other than 0, 1")
        object.__setattr__(self, "a", Fraction(a))
        object.__setattr__(self, "b", Fraction(b))
        object.__setattr__(self, "d", int(d))

    def __setattr__(self, name, value):
        raise AttributeError("QuadElem is immutable")

    @classmethod
    def _raw(cls, a: Fraction, b: Fraction, d: int) -> "QuadElem":
        obj = object.__new__(cls)
        object.__setattr__(obj, "a", a)
        object.__setattr__(obj, "b", b)
        object.__setattr__(obj, "d", d)
        return obj

    @classmethod
    def sqrt(cls, d: int) -> "QuadElem":
        return cls(0, 1, d)

    def _coerce(self, other):
        if isinstance(other, QuadElem):
            if other.d != self.d:
                raise RingMismatchError(f"Q(sqrt({self.d})) vs Q(sqrt({other.d}))")
            return other
        if _is_rational(other):
            return QuadElem._raw(Fraction(other), Fraction(0), self.d)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadElem._raw(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadElem._raw(-self.a, -self.b, self.d)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadElem._raw(self.a - o.a, self.b - o.b, self.d)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        if _is_rational(other):
            f = Fraction(other)
            return QuadElem._raw(self.a * f, self.b * f, self.d)
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadElem._raw(
            self.a * o.a + self.d * self.b * o.b, self.a * o.b + self.b * o.a, self.d
        )

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return self.a * self.a - self.d * self.b * self.b

    def conjugate(self) -> "QuadElem":
        return QuadElem._raw(self.a, -self.b, self.d)

    def inverse(self) -> "QuadElem":
        n = self.norm()
        if n == 0:
            raise NotInvertibleError("zero is not invertible")
        return QuadElem._raw(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = QuadElem._raw(Fraction(1), Fraction(0), self.d)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, QuadElem):
            return self.d == other.d and self.a == other.a and self.b == other.b
        if _is_rational(other):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __repr__(self):
        return f"QuadElem({self.a}, {self.b}, {self.d})"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        return f"{self.a} + {self.b}*sqrt({self.d})"


# ---------------------------------------------------------------------------
# Prime field residues
# ---------------------------------------------------------------------------


class FpElem:
    """Residue class modulo an odd prime ``p``, stored in ``[0, p)``."""

    __slots__ = ("r", "p")

    def __init__(self, r: int, p: int):
        _check_odd_prime(p)
        object.__setattr__(self, "r", int(r) % p)
        object.__setattr__(self, "p", int(p))

    def __setattr__(self, name, value):
        raise AttributeError("FpElem is immutable")

    @classmethod
    def _raw(cls, r: int, p: int) -> "FpElem":
        obj = object.__new__(cls)
        object.__setattr__(obj, "r", r)
        object.__setattr__(obj, "p", p)
        return obj

    @property
    def residue(self) -> int:
        return self.r

    def _coerce(self, other) -> int:
        if isinstance(other, FpElem):
            if other.p != self.p:
                raise RingMismatchError(f"F_{self.p} vs F_{other.p}")
            return other.r
        if isinstance(other, Integral) and not isinstance(other, bool):
            return int(other) % self.p
        if isinstance(other, Fraction):
            if other.denominator % self.p == 0:
                raise NotInvertibleError(f"{other} has no reduction mod {self.p}")
            return other.numerator * pow(other.denominator, -1, self.p) % self.p
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FpElem._raw((self.r + o) % self.p, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FpElem._raw((self.r - o) % self.p, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FpElem._raw((o - self.r) % self.p, self.p)

    def __neg__(self):
        return FpElem._raw(-self.r % self.p, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FpElem._raw(self.r * o % self.p, self.p)

    __rmul__ = __mul__

    def inverse(self) -> "FpElem":
        if self.r == 0:
            raise NotInvertibleError(f"0 is not invertible mod {self.p}")
        return FpElem._raw(pow(self.r, -1, self.p), self.p)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o == 0:
            raise NotInvertibleError(f"division by 0 mod {self.p}")
        return FpElem._raw(self.r * pow(o, -1, self.p) % self.p, self.p)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FpElem._raw(o, self.p) / self

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return FpElem._raw(pow(self.r, k, self.p), self.p)

    def __eq__(self, other):
        if isinstance(other, FpElem):
            return self.p == other.p and self.r == other.r
        if isinstance(other, Integral) and not isinstance(other, bool):
            return self.r == int(other) % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.r, self.p))

    def __bool__(self):
        return self.r != 0

    def __int__(self):
        return self.r

    def __repr__(self):
        return f"FpElem({self.r}, {self.p})"

    def __str__(self):
        return str(self.r)


# ---------------------------------------------------------------------------
# Dense univariate polynomials and rational functions in t
# ---------------------------------------------------------------------------


class Poly:
    """Dense polynomial over a field; ``coeffs[i]`` multiplies ``t**i``.

    Trailing zeros are stripped, so the zero polynomial has ``coeffs == ()``.
    """

    __slots__ = ("coeffs", "base")

    def __init__(self, coeffs, base: "Ring"):
        cs = [base(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "base", base)

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    @classmethod
    def _raw(cls, coeffs, base):
        cs = list(coeffs)
        while cs and not cs[-1]:
            cs.pop()
        obj = object.__new__(cls)
        object.__setattr__(obj, "coeffs", tuple(cs))
        object.__setattr__(obj, "base", base)
        return obj

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def lead(self):
        return self.coeffs[-1] if self.coeffs else self.base.zero

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def __add__(self, other: "Poly") -> "Poly":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return Poly._raw(out, self.base)

    def __neg__(self) -> "Poly":
        return Poly._raw([-c for c in self.coeffs], self.base)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            c = self.base(other)
            return Poly._raw([x * c for x in self.coeffs], self.base)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly._raw((), self.base)
        if len(b) == 1:
            return Poly._raw([x * b[0] for x in a], self.base)
        if len(a) == 1:
            return Poly._raw([a[0] * x for x in b], self.base)
        out = [self.base.zero] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in enumerate(b):
                out[i + j] = out[i + j] + x * y
        return Poly._raw(out, self.base)

    __rmul__ = __mul__

    def divmod(self, other: "Poly"):
        if other.is_zero():
            raise NotInvertibleError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        inv_lead = 1 / other.lead() if not isinstance(other.lead(), FpElem) else other.lead().inverse()
        quot = [self.base.zero] * max(len(rem) - dq, 0)
        while len(rem) - 1 >= dq and rem:
            k = len(rem) - 1 - dq
            c = rem[-1] * inv_lead
            quot[k] = c
            for i, oc in enumerate(other.coeffs):
                rem[k + i] = rem[k + i] - c * oc
            rem.pop()
            while rem and not rem[-1]:
                rem.pop()
        return Poly._raw(quot, self.base), Poly._raw(rem, self.base)

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        inv = 1 / self.lead() if not isinstance(self.lead(), FpElem) else self.lead().inverse()
        return Poly._raw([c * inv for c in self.coeffs], self.base)

    def gcd(self, other: "Poly") -> "Poly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a.divmod(b)[1]
        return a.monic()

    def __call__(self, x):
        acc = self.base.zero
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Poly({list(self.coeffs)!r})"


class RatFuncT:
    """Rational function ``num(t)/den(t)`` kept in lowest terms with monic ``den``."""

    __slots__ = ("num", "den", "field")

    def __init__(self, num: Poly, den: Poly | None = None):
        base = num.base
        if den is None:
            den = Poly._raw((base.one,), base)
        if den.is_zero():
            raise NotInvertibleError("rational function with zero denominator")
        if num.is_zero():
            num, den = num, Poly._raw((base.one,), base)
        elif not den.is_constant():
            g = num.gcd(den)
            if not g.is_constant():
                num = num.divmod(g)[0]
                den = den.divmod(g)[0]
        lead = den.lead()
        if lead != 1:
            inv = 1 / lead if not isinstance(lead, FpElem) else lead.inverse()
            num = num * inv
            den = den * inv
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        object.__setattr__(self, "field", RationalFunctionField(base))

    def __setattr__(self, name, value):
        raise AttributeError("RatFuncT is immutable")

    @classmethod
    def _poly(cls, num: Poly) -> "RatFuncT":
        # num over a constant denominator 1: already canonical
        obj = object.__new__(cls)
        object.__setattr__(obj, "num", num)
        object.__setattr__(obj, "den", Poly._raw((num.base.one,), num.base))
        object.__setattr__(obj, "field", RationalFunctionField(num.base))
        return obj

    @property
    def base(self):
        return self.num.base

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def _coerce(self, other) -> "RatFuncT":
        if isinstance(other, RatFuncT):
            if other.base != self.base:
                raise RingMismatchError(f"{self.field} vs {other.field}")
            return other
        try:
            c = self.base(other)
        except RingError:
            raise
        except TypeError:
            return NotImplemented
        return RatFuncT._poly(Poly._raw((c,), self.base))

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if self.is_polynomial() and o.is_polynomial():
            return RatFuncT._poly(self.num + o.num)
        if self.den == o.den:
            return RatFuncT(self.num + o.num, self.den)
        return RatFuncT(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        obj = object.__new__(RatFuncT)
        object.__setattr__(obj, "num", -self.num)
        object.__setattr__(obj, "den", self.den)
        object.__setattr__(obj, "field", self.field)
        return obj

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if self.is_polynomial() and o.is_polynomial():
            return RatFuncT._poly(self.num * o.num)
        return RatFuncT(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFuncT":
        if self.num.is_zero():
            raise NotInvertibleError("zero rational function is not invertible")
        return RatFuncT(self.den, self.num)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = self.field.one
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __call__(self, x):
        """Evaluate at ``t = x``."""
        d = self.den(x)
        if not d:
            raise NotInvertibleError(f"pole at t = {x}")
        return self.num(x) / d

    def __eq__(self, other):
        if isinstance(other, RatFuncT):
            return self.num == other.num and self.den == other.den
        try:
            o = self._coerce(other)
        except (RingError, TypeError):
            return NotImplemented
        if o is NotImplemented:
            return o
        return self == o

    def __hash__(self):
        return hash((self.num, self.den))

    def __bool__(self):
        return not self.num.is_zero()

    def __repr__(self):
        return f"RatFuncT({list(self.num.coeffs)!r} / {list(self.den.coeffs)!r})"


# ---------------------------------------------------------------------------
# Ring descriptors
# ---------------------------------------------------------------------------


class Ring:
    zero = None
    one = None

    def __call__(self, x):
        raise NotImplementedError

    def contains(self, x) -> bool:
        try:
            return ring_of(x) == self
        except RingError:
            return False


@dataclass(frozen=True)
class RationalField(Ring):
    def __call__(self, x):
        if isinstance(x, Fraction):
            return x
        if _is_rational(x):
            return Fraction(x)
        if isinstance(x, QuadElem) and x.b == 0:
            return x.a
        raise RingMismatchError(f"{x!r} is not rational")

    @property
    def zero(self):
        return Fraction(0)

    @property
    def one(self):
        return Fraction(1)

    def descriptor(self) -> dict:
        return {"kind": "QQ"}

    def __str__(self):
        return "QQ"


QQ = RationalField()


@dataclass(frozen=True)
class QuadraticField(Ring):
    d: int

    def __post_init__(self):
        if self.d in (0, 1) or not is_squarefree(self.d):
            raise RingError(f"radicand {self.d} is not squarefree")

    def __call__(self, x):
        if isinstance(x, QuadElem):
            if x.d != self.d:
                raise RingMismatchError(f"Q(sqrt({x.d})) element in Q(sqrt({self.d}))")
            return x
        if _is_rational(x):
            return QuadElem._raw(Fraction(x), Fraction(0), self.d)
        raise RingMismatchError(f"{x!r} is not in Q(sqrt({self.d}))")

    @property
    def zero(self):
        return QuadElem._raw(Fraction(0), Fraction(0), self.d)

    @property
    def one(self):
        return QuadElem._raw(Fraction(1), Fraction(0), self.d)

    @property
    def gen(self):
        return QuadElem._raw(Fraction(0), Fraction(1), self.d)

    def descriptor(self) -> dict:
        return {"kind": "quadratic", "d": self.d}

    def __str__(self):
        return f"Q(sqrt({self.d}))"


@dataclass(frozen=True)
class PrimeField(Ring):
    p: int

    def __post_init__(self):
        _check_odd_prime(self.p)

    def __call__(self, x):
        if isinstance(x, FpElem):
            if x.p != self.p:
                raise RingMismatchError(f"F_{x.p} element in F_{self.p}")
            return x
        if isinstance(x, Integral) and not isinstance(x, bool):
            return FpElem._raw(int(x) % self.p, self.p)
        if isinstance(x, Fraction):
            return reduce_mod_p(x, self.p)
        raise RingMismatchError(f"{x!r} is not in F_{self.p}")

    @property
    def zero(self):
        return FpElem._raw(0, self.p)

    @property
    def one(self):
        return FpElem._raw(1, self.p)

    def elements(self):
        return [FpElem._raw(r, self.p) for r in range(self.p)]

    def descriptor(self) -> dict:
        return {"kind": "Fp", "p": self.p}

    def __str__(self):
        return f"F_{self.p}"


@dataclass(frozen=True)
class RationalFunctionField(Ring):
    base: Ring

    def __call__(self, x):
        if isinstance(x, RatFuncT):
            if x.base != self.base:
                raise RingMismatchError(f"{x.field} element in {self}")
            return x
        return RatFuncT._poly(Poly._raw((self.base(x),), self.base))

    @property
    def zero(self):
        return RatFuncT._poly(Poly._raw((), self.base))

    @property
    def one(self):
        return RatFuncT._poly(Poly._raw((self.base.one,), self.base))

    @property
    def gen(self) -> RatFuncT:
        """The parameter ``t`` itself."""
        return RatFuncT._poly(Poly._raw((self.base.zero, self.base.one), self.base))

    def descriptor(self) -> dict:
        return {"kind": "ratfunc_t", "base": self.base.descriptor()}

    def __str__(self):
        return f"{self.base}(t)"


def ring_of(x) -> Ring:
    if isinstance(x, FpElem):
        return PrimeField(x.p)
    if isinstance(x, QuadElem):
        return QuadraticField(x.d)
    if isinstance(x, RatFuncT):
        return x.field
    if _is_rational(x):
        return QQ
    raise RingError(f"{type(x).__name__} is not a supported scalar")


def _same_ring(x, y) -> Ring:
    rx, ry = ring_of(x), ring_of(y)
    if rx != ry:
        raise RingMismatchError(f"{rx} vs {ry}")
    return rx


def ring_add(x, y):
    _same_ring(x, y)
    return x + y


def ring_mul(x, y):
    _same_ring(x, y)
    return x * y


def ring_neg(x):
    ring_of(x)
    return -x


def ring_invert(x):
    ring_of(x)
    if not x:
        raise NotInvertibleError("zero is not invertible")
    if isinstance(x, (FpElem, QuadElem, RatFuncT)):
        return x.inverse()
    return 1 / Fraction(x)


# ---------------------------------------------------------------------------
# Reduction modulo p
# ---------------------------------------------------------------------------


def sqrt_in_fp(d: int, p: int) -> set[FpElem]:
    """All square roots of ``d`` modulo the odd prime ``p``."""
    _check_odd_prime(p)
    d %= p
    if d == 0:
        return {FpElem._raw(0, p)}
    if pow(d, (p - 1) // 2, p) != 1:
        return set()
    # Tonelli-Shanks
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(d, q, p), pow(d, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return {FpElem._raw(r, p), FpElem._raw(-r % p, p)}


def _reduce_fraction(x: Fraction, p: int) -> int:
    if x.denominator % p == 0:
        raise NotInvertibleError(f"denominator of {x} is divisible by {p}")
    return x.numerator * pow(x.denominator, -1, p) % p


def reduce_mod_p(x, p: int, root_choice: FpElem | int | None = None) -> FpElem:
    """Image of a rational or quadratic element under a ring map to ``F_p``.

    For ``a + b*sqrt(d)`` the map sends ``sqrt(d)`` to ``root_choice``, which
    must square to ``d`` modulo ``p``.
    """
    _check_odd_prime(p)
    if isinstance(x, FpElem):
        if x.p != p:
            raise RingMismatchError(f"F_{x.p} element reduced mod {p}")
        return x
    if _is_rational(x):
        return FpElem._raw(_reduce_fraction(Fraction(x), p), p)
    if isinstance(x, QuadElem):
        if x.b == 0:
            return FpElem._raw(_reduce_fraction(x.a, p), p)
        if root_choice is None:
            raise RingError(f"no square root of {x.d} chosen mod {p}")
        r = int(root_choice) % p
        if (r * r - x.d) % p:
            raise RingError(f"{r}^2 is not {x.d} mod {p}")
        e = max(0, -p_valuation(x.a, p), -p_valuation(x.b, p))
        if e == 0:
            return FpElem._raw((_reduce_fraction(x.a, p) + _reduce_fraction(x.b, p) * r) % p, p)
        return FpElem._raw(_reduce_split(x, p, r, e), p)
    raise RingError(f"cannot reduce {type(x).__name__} mod p")


def _hensel_sqrt(d: int, p: int, r: int, k: int) -> int:
    """Lift a square root ``r`` of ``d`` mod ``p`` to one mod ``p**k``."""
    if (2 * r * d) % p == 0:
        raise NotInvertibleError(f"cannot lift sqrt({d}) at {p}")
    mod = p
    while mod < p**k:
        mod = min(mod * mod, p**k)
        r = (r - (r * r - d) * pow(2 * r, -1, mod)) % mod
    return r


def _reduce_split(x: "QuadElem", p: int, r: int, e: int) -> int:
    """Reduce ``a + b*sqrt(d)`` with ``p^e`` in its denominator at the prime above ``p`` fixed by ``r``.

    Works when ``p`` splits: the element is integral at one of the two primes
    above ``p`` exactly when ``p^e`` divides the numerator after substituting a
    ``p``-adic lift of the root.
    """
    m = math.lcm(x.a.denominator, x.b.denominator)
    A, B = int(x.a * m), int(x.b * m)
    mp = m // p**e
    mod = p ** (e + 1)
    rl = _hensel_sqrt(x.d, p, r, e + 1)
    num = (A + B * rl) % mod
    if num % p**e:
        raise NotInvertibleError(f"{x} is not integral at the chosen prime above {p}")
    return (num // p**e) * pow(mp, -1, p) % p


def p_valuation(x, p: int) -> int | float:
    """p-adic valuation of a rational; ``inf`` for zero."""
    x = Fraction(x)
    if x == 0:
        return float("inf")
    v = 0
    n, d = x.numerator, x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def _frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def scalar_to_json(x):
    if isinstance(x, FpElem):
        return x.r
    if isinstance(x, QuadElem):
        return {"a": _frac_str(x.a), "b": _frac_str(x.b), "d": x.d}
    if isinstance(x, RatFuncT):
        return {
            "num": [scalar_to_json(c) for c in x.num.coeffs],
            "den": [scalar_to_json(c) for c in x.den.coeffs],
        }
    if _is_rational(x):
        return _frac_str(Fraction(x))
    raise RingError(f"cannot serialize {type(x).__name__}")


def scalar_from_json(obj, ring: Ring):
    if isinstance(ring, PrimeField):
        return ring(int(obj))
    if isinstance(ring, RationalField):
        return Fraction(obj)
    if isinstance(ring, QuadraticField):
        return QuadElem(Fraction(obj["a"]), Fraction(obj["b"]), obj["d"])
    if isinstance(ring, RationalFunctionField):
        num = Poly([scalar_from_json(c, ring.base) for c in obj["num"]], ring.base)
        den = Poly([scalar_from_json(c, ring.base) for c in obj["den"]], ring.base)
        return RatFuncT(num, den)
    raise RingError(f"unknown ring {ring!r}")
