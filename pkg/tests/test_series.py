from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given
from hypothesis import strategies as st

from multsq.catalog import LatticeId, known_solution, theta_series
from multsq.rings import QQ, NotInvertibleError, PrimeField
from multsq.series import (
    TruncSeries,
    check_normalized_multiplicative,
    composite_indices,
    normalize,
    normalized_power,
    rank_matrices,
    residual_P,
    residual_Q,
    series_mul,
    substitute_power,
)


def S(*cs):
    return TruncSeries.from_coeffs([Fraction(c) for c in cs], QQ)


int_series = st.integers(2, 40).flatmap(
    lambda N: st.lists(st.integers(-9, 9), min_size=N + 1, max_size=N + 1))


def _naive_mul(a, b):
    N = min(len(a), len(b)) - 1
    return [sum(a[i] * b[k - i] for i in range(k + 1)) for k in range(N + 1)]


@given(int_series, int_series)
def test_series_mul_matches_convolution(a, b):
    f, g = S(*a), S(*b)
    assert list(series_mul(f, g).coeffs) == _naive_mul(a, b)


@given(st.lists(st.integers(0, 12), min_size=65, max_size=65),
       st.lists(st.integers(0, 12), min_size=65, max_size=65))
def test_series_mul_mod_p_at_depth_64(a, b):
    F = PrimeField(13)
    f = TruncSeries.from_coeffs(a, F)
    g = TruncSeries.from_coeffs(b, F)
    assert [int(c) for c in series_mul(f, g).coeffs] == [x % 13 for x in _naive_mul(a, b)]


def test_series_mul_examples():
    assert series_mul(S(1, 1, 0), S(1, -1, 0)) == S(1, 0, -1)
    th = theta_series(LatticeId.Z, 8)
    assert series_mul(th, th) == theta_series(LatticeId.Zi, 8)


def test_truncates_to_shorter():
    assert series_mul(S(1, 1, 1, 1), S(1, 1)).N == 1


@given(int_series, st.integers(1, 5), st.integers(1, 5))
def test_substitute_power_composition(a, j, k):
    f = S(*a)
    assert substitute_power(substitute_power(f, j), k) == substitute_power(f, j * k)


def test_substitute_power_examples():
    assert substitute_power(S(1, 1, 0, 0, 0), 4) == S(1, 0, 0, 0, 1)
    th = theta_series(LatticeId.Z, 9)
    assert substitute_power(th, 2) == S(Fraction(1, 2), 0, 1, 0, 0, 0, 0, 0, 1, 0)
    assert substitute_power(th, 1) == th


def _brute_mult(c):
    N = len(c) - 1
    bad = []
    for m in range(2, N + 1):
        for n in range(m + 1, N + 1):
            if m * n <= N and gcd(m, n) == 1 and c[m * n] != c[m] * c[n]:
                bad.append((m, n))
    return bad


@given(st.integers(2, 60).flatmap(
    lambda N: st.lists(st.sampled_from([-1, 0, 1, 2]), min_size=N + 1, max_size=N + 1)))
def test_mult_check_matches_brute_force(a):
    a[1] = 1
    rep = check_normalized_multiplicative(S(*a))
    assert sorted(rep.violations) == _brute_mult(a)


def test_mult_check_examples():
    xiii = S(Fraction(1, 6), 1, -1, 0, 1, -1, 0, 1, -1)
    assert check_normalized_multiplicative(xiii).ok
    rep = check_normalized_multiplicative(S(1, 1, 1, 0, 0, 0, 3))
    assert rep.violations == [(2, 3)]
    assert check_normalized_multiplicative(S(Fraction(1, 12), 1, 2, 3, 4)).ok


def test_normalize():
    assert normalize(S(2, 2, 6)) == S(1, 1, 3)
    f = S(1, 1, 3)
    assert normalize(f) == f
    with pytest.raises(NotInvertibleError):
        normalize(S(1, 0, 3))


@given(st.fractions(min_value=-5, max_value=5, max_denominator=7).filter(bool), int_series)
def test_normalized_square_constant(c0, a):
    a = [c0, 1] + a[2:]
    b = normalized_power(S(*a), 2)
    a0 = 1 / (2 * c0)
    assert b.coeffs[1] == 1
    assert b.coeffs[0] == 1 / (4 * a0)


def test_normalized_power_examples():
    th = theta_series(LatticeId.Z, 20)
    assert normalized_power(th, 2).coeffs[0] == Fraction(1, 4)
    assert normalized_power(S(Fraction(1, 2), 1, 0), 2) == S(Fraction(1, 4), 1, Fraction(1, 2) * 2)
    # f^4/(4 c0^3) equals the normalized square of the normalized square
    b = normalized_power(th, 2)
    assert normalized_power(th, 4) == normalized_power(b, 2)


def test_residual_P_examples():
    z3 = theta_series(LatticeId.Zzeta3, 30)
    f = normalize(series_mul(z3, z3))
    assert residual_P(f, 6) == 0
    xii = known_solution("xii", Fraction(1, 2), 20)  # all-ones with c0 = 1/2
    assert all(c == 1 for c in xii.coeffs[1:]) and xii.coeffs[0] == Fraction(1, 2)
    assert residual_P(xii, 10) == 0
    with pytest.raises(ValueError):
        residual_P(xii, 8)


def test_residual_P_perturbation():
    f = known_solution("xiv", None, 30)
    g = TruncSeries(QQ, (f.coeffs[0], f.coeffs[1], f.coeffs[2] + 1) + f.coeffs[3:])
    first = next(n for n in composite_indices(30) if residual_P(g, n) != 0)
    assert first == 6


def test_residual_Q_examples():
    th = theta_series(LatticeId.Z, 30)
    assert residual_Q(th, 6) == 0
    assert residual_Q(theta_series(LatticeId.Zzeta3, 30), 20) == 0
    assert residual_Q(known_solution("xiv", None, 30), 6) != 0


def test_rank_matrices():
    assert rank_matrices(known_solution("i", None, 16)).full
    ones = S(Fraction(1, 2), *([1] * 16))
    assert not rank_matrices(ones).full
    sparse = S(Fraction(1, 2), 1, *([0] * 15))
    assert not rank_matrices(sparse).full


def test_series_json_round_trip():
    f = known_solution("ix", 2, 12)
    assert TruncSeries.from_json(f.to_json()) == f
