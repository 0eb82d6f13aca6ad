from fractions import Fraction
from itertools import product

import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from multsq.catalog import (
    ALL_IDS,
    EISENSTEIN_GAMMA,
    PARAMETRIC_IDS,
    T,
    LatticeId,
    delta_series,
    eisenstein,
    known_solution,
    match_divisor_combination,
    printed_ix_prime_parts,
    sigma,
    sign_flip,
    theta_series,
)
from multsq.rings import QQ, PrimeField, QuadraticField, RationalFunctionField
from multsq.series import (
    TruncSeries,
    check_normalized_multiplicative,
    composite_indices,
    normalized_power,
    residual_P,
    series_mul,
    substitute_power,
)


def S(*cs):
    return TruncSeries.from_coeffs([Fraction(c) for c in cs], QQ)


def _counts_oracle(form, N, units, box):
    """Representation counts of n <= N by a binary form, by brute force over a box."""
    a, b, c = form
    r = [0] * (N + 1)
    for x in range(-box, box + 1):
        for y in range(-box, box + 1):
            n = a * x * x + b * x * y + c * y * y
            if n <= N:
                r[n] += 1
    return [Fraction(v, units) for v in r]


@pytest.mark.parametrize("L,form,units", [
    (LatticeId.Zi, (1, 0, 1), 4),
    (LatticeId.Zzeta3, (1, 1, 1), 6),
    (LatticeId.Ztau7, (1, 1, 2), 2),
    (LatticeId.Zsqrtm2, (1, 0, 2), 2),
])
def test_binary_theta_against_enumeration(L, form, units):
    N = 60
    assert list(theta_series(L, N).coeffs) == _counts_oracle(form, N, units, 12)
    assert L.units == units


def test_theta_Z_example():
    assert theta_series(LatticeId.Z, 9) == S(Fraction(1, 2), 1, 0, 0, 1, 0, 0, 0, 0, 1)


def _e8_counts(N):
    # doubled coordinates: all even or all odd, sum = 0 mod 4, sum of squares = 8n
    counts = []
    for parity in (0, 1):
        vals = [v for v in range(-2 * int(np.sqrt(2 * N)) - 2, 2 * int(np.sqrt(2 * N)) + 3)
                if v % 2 == parity and v * v <= 8 * N]
        dp = {(0, 0): 1}
        for _ in range(8):
            nxt = {}
            for (s, m), k in dp.items():
                for v in vals:
                    s2 = s + v * v
                    if s2 <= 8 * N:
                        key = (s2, (m + v) % 4)
                        nxt[key] = nxt.get(key, 0) + k
            dp = nxt
        counts.append(dp)
    return [sum(dp.get((8 * n, 0), 0) for dp in counts) for n in range(N + 1)]


def test_e8_closed_form_against_enumeration():
    r = _e8_counts(10)
    assert r[1] == 240
    assert [Fraction(x, 240) for x in r] == list(theta_series(LatticeId.E8, 10).coeffs)


def test_hurwitz_examples():
    assert LatticeId.Hurwitz.units == 24 and LatticeId.E8.units == 240
    E2 = eisenstein(2, 200)
    assert theta_series(LatticeId.Hurwitz, 200) == E2 * Fraction(-1, 24) + substitute_power(E2, 2) * Fraction(1, 12)


@pytest.mark.parametrize("k", [2, 4, 6, 8, 10, 12])
def test_eisenstein_gamma_matches_bernoulli(k):
    assert EISENSTEIN_GAMMA[k] == Fraction(-2 * k) / Fraction(str(sympy.bernoulli(k)))


def test_eisenstein_examples():
    assert eisenstein(4, 3).coeffs[1] == 240
    F13 = PrimeField(13)
    E12 = eisenstein(12, 60)
    assert all(F13(c) == (F13.one if n == 0 else F13.zero) for n, c in enumerate(E12.coeffs))
    assert eisenstein(10, 50) == series_mul(eisenstein(4, 50), eisenstein(6, 50))
    with pytest.raises(ValueError):
        eisenstein(14, 5)


def test_sigma_oracle():
    for n in range(1, 60):
        assert sigma(3, n) == sum(d**3 for d in range(1, n + 1) if n % d == 0)


def test_delta_examples():
    D = delta_series(30)
    assert D.coeffs[1] == 1 and D.coeffs[2] == -24
    E4, E6 = eisenstein(4, 30), eisenstein(6, 30)
    assert D == (E4**3 - E6**2) * Fraction(1, 1728)


def test_known_solution_examples():
    assert known_solution("xiii", None, 8) == S(Fraction(1, 6), 1, -1, 0, 1, -1, 0, 1, -1)
    R = RationalFunctionField(QQ)
    t = R.gen
    xii = known_solution("xii", T, 6)
    assert list(xii.coeffs) == [t, R.one, t * 2, R.one, t * 2, R.one, t * 2]
    vii = known_solution("vii", T, 4)
    # 4 is a square, so theta_Z contributes to q^4 as well
    assert list(vii.coeffs) == [(t + 1) / 2, R.one, R.zero, R.zero, t + 1]


def test_parameter_arity():
    for sid in ALL_IDS:
        if sid in PARAMETRIC_IDS:
            with pytest.raises(ValueError):
                known_solution(sid, None, 10)
        else:
            with pytest.raises(ValueError):
                known_solution(sid, 3, 10)


def test_sign_flip_examples():
    f = known_solution("i", None, 30)
    assert sign_flip(sign_flip(f)) == f
    assert sign_flip(f) == known_solution("i'", None, 30)
    assert sign_flip(known_solution("xiii", None, 8)) == S(Fraction(-1, 6), 1, 1, 0, -1, -1, 0, 1, 1)


@given(st.sampled_from(ALL_IDS), st.integers(-6, 6).filter(lambda t: t != -1))
def test_sign_flip_preserves_solutions(sid, t):
    param = t if sid.parametric else None
    try:
        f = known_solution(sid, param, 40)
    except ValueError:
        return  # parameter lands on c0 = 0
    g = sign_flip(f)
    assert check_normalized_multiplicative(g).ok
    assert check_normalized_multiplicative(normalized_power(g, 2)).ok


@pytest.mark.parametrize("sid", ALL_IDS, ids=str)
def test_residual_P_vanishes_symbolically(sid):
    f = known_solution(sid, T if sid.parametric else None, 60)
    g = normalized_power(f, 2)
    for n in composite_indices(60):
        assert g.coeffs[n] == _prod_pp(g, n)
        assert residual_P(f, n) == 0


def _prod_pp(g, n):
    out = g.ring.one
    for p, e in sympy.factorint(n).items():
        out = out * g.coeffs[p**e]
    return out


def test_x_square_identity():
    N = 100
    K = QuadraticField(-2)
    s = K.gen
    f = known_solution("x", None, N)
    G = eisenstein(2, N) * Fraction(-1, 24)  # -1/24 + sum sigma_1(n) q^n
    G = G.map(K, K)
    rhs = G - substitute_power(G, 2) * 2 + substitute_power(G, 3) * (1 + 2 * s) \
        - substitute_power(G, 6) * (2 + 4 * s)
    assert (series_mul(f, f)) * (1 - s) == rhs


def test_ix_prime_printed_form_is_not_multiplicative():
    f0, f1 = printed_ix_prime_parts(12)
    f = f0 + f1 * 2
    assert (2, 3) in check_normalized_multiplicative(f).violations


@given(st.fractions(min_value=-9, max_value=9, max_denominator=5))
def test_uv_family_multiplicative(v):
    # symbolic in u, rational v
    R = RationalFunctionField(QQ)
    u = R.gen
    th = theta_series(LatticeId.Zi, 100).map(R, R)
    f = th + substitute_power(th, 2) * u + substitute_power(th, 3) * R(v) + substitute_power(th, 6) * (u * v)
    assert check_normalized_multiplicative(f).is_multiplicative


def test_two_plus_delta_mod_13():
    N = 1000
    F = PrimeField(13)
    D = delta_series(N)
    f = TruncSeries(F, (F(2),) + tuple(F(int(c)) for c in D.coeffs[1:]))
    assert check_normalized_multiplicative(f).ok
    assert check_normalized_multiplicative(normalized_power(f, 2)).ok


def test_match_divisor_combination_examples():
    F = PrimeField(19)
    N = 60
    E6 = eisenstein(6, N).map(F, F)
    target = E6 - substitute_power(E6, 2) + substitute_power(E6, 4) * 7
    sol = match_divisor_combination(target, E6, 4)
    assert {d: int(c) for d, c in sol.items()} == {1: 1, 2: 18, 4: 7}
    assert {d: int(c) for d, c in match_divisor_combination(E6, E6, 4).items()} == {1: 1, 2: 0, 4: 0}
    rng = np.random.default_rng(1)
    noise = TruncSeries(F, tuple(F(int(x)) for x in rng.integers(0, 19, N + 1)))
    assert match_divisor_combination(noise, E6, 4) is None


@pytest.mark.parametrize("sid", ALL_IDS, ids=str)
def test_catalog_entries_are_solutions(sid):
    f = known_solution(sid, T if sid.parametric else None, 120)
    assert check_normalized_multiplicative(f).ok
    assert check_normalized_multiplicative(normalized_power(f, 2)).ok


def test_identities_depth_200():
    N = 200
    Z, Zi, H = (theta_series(L, N) for L in (LatticeId.Z, LatticeId.Zi, LatticeId.Hurwitz))
    assert series_mul(Z, Z) == Zi
    assert series_mul(Zi, Zi) * 2 == H + substitute_power(H, 2) * 2
    assert theta_series(LatticeId.E8, N) == eisenstein(4, N) * Fraction(1, 240)
    E4, E6 = eisenstein(4, 100), eisenstein(6, 100)
    assert eisenstein(12, 100) * 691 == E4**3 * 441 + E6**2 * 250


def test_theta_binary_enumeration_box_large_enough():
    # the oracle box must cover every vector of norm <= 60 for each form
    for a, b, c in [(1, 0, 1), (1, 1, 1), (1, 1, 2), (1, 0, 2)]:
        for x, y in product(range(-13, 14), repeat=2):
            if a * x * x + b * x * y + c * y * y <= 60:
                assert max(abs(x), abs(y)) <= 12
