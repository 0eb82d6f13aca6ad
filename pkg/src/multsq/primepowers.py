"""The set of prime powers and executable witnesses for the gap lemmas.

``P`` below always means the set of positive powers ``l**k`` (``k >= 1``) of
primes ``l``; 1 is not in it.

Small integers are answered from a smallest-prime-factor sieve.  Integers
beyond the sieve (``2**q - 2`` scale and up) are handled by trial division
with primes below 1000 plus exact valuations, falling back to a perfect-power
and probable-prime test only when no small factor exists.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Any

import numpy as np
from sympy import integer_nthroot, isprime

__all__ = [
    "PrimePowerTable",
    "WitnessReport",
    "HypothesisError",
    "default_table",
    "is_prime_power",
    "prime_power_witness",
    "factorize",
    "classify_adjacent",
    "verify_gap_lemma",
    "verify_ap_lemma",
    "smallest_nondividing_prime",
    "cantor_find",
    "cantor_bound",
    "mersenne_witness_search",
    "MERSENNE_PRIMES",
    "FERMAT_PRIMES",
    "GAP_LEMMAS",
]

# Mersenne primes below 2**32 and all known Fermat primes.
MERSENNE_PRIMES = (3, 7, 31, 127, 8191, 131071, 524287, 2147483647)
FERMAT_PRIMES = (3, 5, 17, 257, 65537)


class HypothesisError(ValueError):
    """The parameters do not satisfy the lemma's hypotheses."""


class PrimePowerTable:
    """Smallest-prime-factor sieve on ``[0, limit]``."""

    def __init__(self, limit: int):
        limit = max(int(limit), 16)
        spf = np.zeros(limit + 1, dtype=np.int64)
        spf[2::2] = 2
        for i in range(3, math.isqrt(limit) + 1, 2):
            if spf[i] == 0:
                block = spf[i * i :: 2 * i]
                block[block == 0] = i
        odd = np.arange(limit + 1)
        zero = (spf == 0) & (odd >= 2)
        spf[zero] = odd[zero]
        self.limit = limit
        self.spf = spf
        self._pp_mask = None

    def smallest_prime_factor(self, n: int) -> int:
        return int(self.spf[n])

    def factorize(self, n: int) -> dict[int, int]:
        if n < 1 or n > self.limit:
            raise ValueError(f"{n} outside sieve range [1, {self.limit}]")
        out: dict[int, int] = {}
        while n > 1:
            ell = int(self.spf[n])
            e = 0
            while n % ell == 0:
                n //= ell
                e += 1
            out[ell] = e
        return out

    def prime_power_factors(self, n: int) -> list[int]:
        """The maximal prime-power divisors ``p_i**e_i`` of ``n``, increasing by prime."""
        return [ell**e for ell, e in sorted(self.factorize(n).items())]

    def is_prime_power(self, n: int) -> bool:
        if n < 2:
            return False
        ell = int(self.spf[n])
        while n % ell == 0:
            n //= ell
        return n == 1

    def prime_power_mask(self) -> np.ndarray:
        """Boolean array ``mask[n] = (n in P)`` for ``0 <= n <= limit``."""
        if self._pp_mask is None:
            n = np.arange(self.limit + 1)
            m = n.copy()
            ell = self.spf.copy()
            ell[:2] = 1
            valid = n >= 2
            # strip the smallest prime until nothing divides any more
            while True:
                div = valid & (m % np.where(ell > 1, ell, 1) == 0) & (m > 1)
                if not div.any():
                    break
                m[div] //= ell[div]
            self._pp_mask = valid & (m == 1)
        return self._pp_mask

    def primes(self, upto: int | None = None) -> np.ndarray:
        upto = self.limit if upto is None else min(upto, self.limit)
        idx = np.arange(upto + 1)
        return idx[(idx >= 2) & (self.spf[: upto + 1] == idx)]


_TABLES: dict[str, PrimePowerTable] = {}


def default_table(limit: int = 1 << 16) -> PrimePowerTable:
    """Shared sieve covering at least ``limit``; rebuilt larger on demand."""
    tab = _TABLES.get("default")
    if tab is None or tab.limit < limit:
        tab = PrimePowerTable(max(limit, 1 << 16))
        _TABLES["default"] = tab
    return tab


_SMALL_PRIMES = [p for p in range(2, 1000) if isprime(p)]


def factorize(n: int) -> dict[int, int]:
    tab = default_table()
    if n <= tab.limit:
        return tab.factorize(n)
    from sympy import factorint

    return {int(k): int(v) for k, v in factorint(n).items()}


def _valuation(n: int, ell: int) -> tuple[int, int]:
    v = 0
    while n % ell == 0:
        n //= ell
        v += 1
    return v, n


def prime_power_witness(n: int) -> dict[str, Any]:
    """Membership in ``P`` with a certificate.

    ``{"member": True, "prime": l, "exponent": k}`` when ``n == l**k``;
    otherwise ``{"member": False, ...}`` carrying either a prime ``l`` that
    divides ``n`` with ``n != l**v_l(n)`` or a second distinct prime factor.
    """
    if n < 2:
        return {"member": False, "reason": "n < 2"}
    tab = default_table()
    if n <= tab.limit:
        f = tab.factorize(n)
        if len(f) == 1:
            (ell, e), = f.items()
            return {"member": True, "prime": ell, "exponent": e}
        ell = min(f)
        return {"member": False, "prime": ell, "valuation": f[ell], "cofactor": n // ell ** f[ell]}
    for ell in _SMALL_PRIMES:
        if n % ell == 0:
            v, rest = _valuation(n, ell)
            if rest == 1:
                return {"member": True, "prime": ell, "exponent": v}
            return {"member": False, "prime": ell, "valuation": v, "cofactor": rest}
    # no factor below 1000: test n = m**k for a prime m
    for k in range(1, n.bit_length() + 1):
        m, exact = integer_nthroot(n, k)
        if m < 1000:
            break
        if exact and isprime(int(m)):
            return {"member": True, "prime": int(m), "exponent": k}
    return {"member": False, "reason": "not a prime power (probabilistic primality)"}


def is_prime_power(n: int) -> bool:
    if n < 2:
        return False
    tab = default_table()
    if n <= tab.limit:
        return tab.is_prime_power(n)
    return prime_power_witness(n)["member"]


@dataclass
class WitnessReport:
    lemma: str
    params: dict[str, Any]
    witnesses: list[dict[str, Any]] = field(default_factory=list)
    passed: bool = True
    note: str = ""

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def to_json(self) -> dict[str, Any]:
        return {
            "schema": "multsq.witness/1",
            "lemma": self.lemma,
            "params": self.params,
            "witnesses": self.witnesses,
            "verdict": self.verdict,
            "note": self.note,
        }


def _is_mersenne_prime(p: int) -> bool:
    return p >= 3 and (p + 1) & p == 0 and isprime(p)


def _is_fermat_prime(p: int) -> bool:
    if p < 3 or not isprime(p):
        return False
    m = p - 1
    if m & (m - 1):
        return False
    k = m.bit_length() - 1
    return k & (k - 1) == 0


def classify_adjacent(k: int) -> tuple[str, int] | None:
    """``("mersenne", k)``, ``("fermat", k + 1)`` or ``None``.

    Only meaningful for ``k > 8``; a verdict other than ``None`` requires both
    ``k`` and ``k + 1`` to be prime powers.
    """
    if k <= 8:
        raise HypothesisError("classify_adjacent needs k > 8")
    if not (is_prime_power(k) and is_prime_power(k + 1)):
        return None
    if _is_mersenne_prime(k):
        return ("mersenne", k)
    if _is_fermat_prime(k + 1):
        return ("fermat", k + 1)
    # the lemma says this cannot happen
    raise AssertionError(f"{k}, {k + 1} both prime powers but neither Mersenne nor Fermat")


def _non_member_entry(n: int, offset_label: str) -> dict[str, Any]:
    w = prime_power_witness(n)
    entry = {"index": offset_label, "n": n, "in_P": w["member"]}
    if not w["member"] and "prime" in w:
        entry["divisor"] = w["prime"]
    return entry


# offsets asserted outside P, keyed by lemma name
_MERSENNE_OFFSETS = (2, 3, 5, 7, 8, 9, 11, 13, 14, 15)
_FERMAT_OFFSETS = (1, 3, 4, 5, 7, 8, 9, 10, 11)

GAP_LEMMAS = ("MersenneGaps", "FermatGaps", "DoubleF", "TripleM", "MandM", "MandF")


def verify_gap_lemma(lemma: str, *params: int) -> WitnessReport:
    """Check every non-membership asserted by one of the gap lemmas."""
    report = WitnessReport(lemma, {"params": list(params)})

    def require(cond: bool, msg: str):
        if not cond:
            raise HypothesisError(f"{lemma}{params}: {msg}")

    def check(n: int, label: str):
        e = _non_member_entry(n, label)
        report.witnesses.append(e)
        if e["in_P"]:
            report.passed = False

    if lemma == "MersenneGaps":
        (p,) = params
        require(p > 7 and _is_mersenne_prime(p), "needs a Mersenne prime > 7")
        for n in _MERSENNE_OFFSETS:
            check(p + n, f"p+{n}")
        a = _non_member_entry(p + 4, "p+4")
        b = _non_member_entry(p + 6, "p+6")
        report.witnesses += [a, b]
        if a["in_P"] and b["in_P"]:
            report.passed = False
    elif lemma == "FermatGaps":
        (p,) = params
        require(p > 17 and _is_fermat_prime(p), "needs a Fermat prime > 17")
        for n in _FERMAT_OFFSETS:
            check(p + n, f"p+{n}")
    elif lemma == "DoubleF":
        (p,) = params
        require(p > 5 and _is_fermat_prime(p), "needs a Fermat prime > 5")
        check(2 * p - 1, "2p-1")
        check(2 * p + 1, "2p+1")
    elif lemma == "TripleM":
        (p,) = params
        require(p > 7 and _is_mersenne_prime(p), "needs a Mersenne prime > 7")
        if is_prime_power(2 * p + 3):
            check(3 * p + 4, "3p+4")
        else:
            report.note = "2p+3 not in P: conclusion holds vacuously"
            report.witnesses.append(_non_member_entry(2 * p + 3, "2p+3"))
    elif lemma == "MandM":
        p1, p2 = params
        require(p1 > 3 and p2 > 3 and _is_mersenne_prime(p1) and _is_mersenne_prime(p2),
                "needs two Mersenne primes > 3")
        check(p1 + p2 + 1, "p1+p2+1")
    elif lemma == "MandF":
        p1, p2 = params
        require(3 < p1 < p2 and _is_mersenne_prime(p1) and _is_fermat_prime(p2),
                "needs Mersenne p1 and Fermat p2 with 3 < p1 < p2")
        check(2 * p1 + p2 + 2, "2p1+p2+2")
    else:
        raise ValueError(f"unknown lemma {lemma!r}")
    return report


def applicable_gap_instances(bound: int = 1 << 31) -> list[tuple[str, tuple[int, ...]]]:
    """Every hypothesis-satisfying instance with all primes ``<= bound``."""
    ms = [p for p in MERSENNE_PRIMES if p <= bound]
    fs = [p for p in FERMAT_PRIMES if p <= bound]
    out: list[tuple[str, tuple[int, ...]]] = []
    out += [("MersenneGaps", (p,)) for p in ms if p > 7]
    out += [("FermatGaps", (p,)) for p in fs if p > 17]
    out += [("DoubleF", (p,)) for p in fs if p > 5]
    out += [("TripleM", (p,)) for p in ms if p > 7]
    out += [("MandM", pair) for pair in combinations_with_replacement([p for p in ms if p > 3], 2)]
    out += [("MandF", (a, b)) for a in ms for b in fs if 3 < a < b]
    return out


def verify_ap_lemma(k: int) -> WitnessReport:
    """Initial terms ``a in [1, 2**(2k+1)]`` whose progression stays inside ``P``.

    The progression has common difference ``2**k - 2`` and ``2**(k-2)`` terms.
    """
    if not 5 <= k <= 12:
        raise HypothesisError("verify_ap_lemma is capped at 5 <= k <= 12")
    diff = 2**k - 2
    length = 2 ** (k - 2)
    top = 2 ** (2 * k + 1)
    last = top + (length - 1) * diff
    mask = default_table(last).prime_power_mask()
    alive = np.nonzero(mask[1 : top + 1])[0] + 1
    for j in range(1, length):
        if alive.size == 0:
            break
        alive = alive[mask[alive + j * diff]]
    exceptions = [int(a) for a in alive]
    report = WitnessReport("AP", {"k": k, "difference": diff, "length": length, "a_max": top})
    report.witnesses = [{"a": a, "terms_in_P": length} for a in exceptions]
    report.note = f"exceptional initial terms: {exceptions}"
    report.passed = exceptions == ([19] if k == 5 else [])
    return report


def smallest_nondividing_prime(k: int) -> int:
    """Least prime not dividing ``2**k - 2``; always at most ``4k + 1``."""
    if k <= 1:
        raise HypothesisError("needs k > 1")
    ell = 2
    while True:
        if isprime(ell) and (pow(2, k, ell) - 2) % ell:
            break
        ell += 1
    assert ell <= 4 * k + 1, (k, ell)
    return ell


def cantor_bound(d: int) -> float:
    return (2 * d * d) ** (9 * math.log(2 * d))


def cantor_find(ell: int, d: int, a: int) -> int:
    """Smallest positive ``n = a (mod d)`` whose base-``ell`` digits are all ``<= (ell-1)/2``.

    Such an ``n`` has no carries when doubled, so ``ell`` does not divide
    ``binomial(2n, n)`` by Kummer's theorem.
    """
    if ell < 3 or not isprime(ell):
        raise HypothesisError("ell must be an odd prime")
    if d < 1 or d % ell == 0:
        raise HypothesisError("d must be positive and prime to ell")
    a %= d
    half = (ell - 1) // 2
    # i -> (digits of i in base half+1, read in base ell) is increasing
    i = 1
    bound = cantor_bound(d)
    while True:
        n, pos, j = 0, 1, i
        while j:
            n += (j % (half + 1)) * pos
            j //= half + 1
            pos *= ell
        if n % d == a:
            assert n <= bound
            return n
        i += 1


def mersenne_witness_search(q: int) -> tuple[int, int, int, int] | None:
    """First ``i < j <= 11`` with ``i(2**q-2)+1`` and ``j(2**q-2)+1`` certified outside ``P``.

    Certificates are primes below 1000 dividing the number without the
    number being a power of that prime.  Returns ``(i, j, l_i, l_j)`` or
    ``None`` if fewer than two indices have a small-prime certificate.
    """
    if not isprime(q) or q >= 2000:
        raise HypothesisError("q must be a prime below 2000")
    step = 2**q - 2
    found: list[tuple[int, int]] = []
    for i in range(1, 12):
        n = i * step + 1
        for ell in _SMALL_PRIMES:
            if n % ell == 0:
                v, rest = _valuation(n, ell)
                if rest != 1:
                    found.append((i, ell))
                break
        if len(found) == 2:
            (i1, l1), (i2, l2) = found
            return i1, i2, l1, l2
    return None
