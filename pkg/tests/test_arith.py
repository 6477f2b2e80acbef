from fractions import Fraction
from math import pi, prod

import pytest
from hypothesis import given
from hypothesis import strategies as st

from goldfeld.arith import (
    TooLargeError,
    crt,
    divisors,
    factorize,
    field_discriminant,
    hensel_sqrt,
    is_fundamental_discriminant,
    is_prime,
    kronecker,
    primes_up_to,
    sixth_power_free_core,
    sqrt_mod_prime,
    valuation,
)
from goldfeld.classgroups import fundamental_discriminants
from oracles import fundamental_naive, is_prime_naive, kronecker_naive, trial_factor


@pytest.mark.parametrize("a,n,want", [(1, 7, 1), (8, 19, -1), (-23, 2, 1), (5, -1, 1), (-5, -1, -1), (3, 2, -1), (6, 2, 0)])
def test_kronecker_examples(a, n, want):
    assert kronecker(a, n) == want


def test_kronecker_rejects_zero_zero():
    with pytest.raises(ValueError):
        kronecker(0, 0)


def test_kronecker_matches_definition():
    for a in range(-60, 61):
        for n in range(-60, 61):
            if a == 0 and n == 0:
                continue
            assert kronecker(a, n) == kronecker_naive(a, n), (a, n)


def test_kronecker_multiplicative_in_top_exhaustive():
    vals = range(-500, 501)
    for n in range(-500, 501, 7):
        if n == 0:
            continue
        k = {a: kronecker(a, n) for a in vals}
        for a in range(-500, 501, 13):
            for b in range(-500, 501, 11):
                assert k[a] * k[b] == kronecker(a * b, n)


def test_kronecker_periodic_for_fundamental():
    for d in range(-200, 201):
        if not is_fundamental_discriminant(d):
            continue
        f = abs(d)
        for n in range(1, 2 * f + 1):
            assert kronecker(d, n) == kronecker(d, n + f)


@given(st.integers(-10**6, 10**6), st.integers(1, 10**6), st.integers(1, 10**6))
def test_kronecker_multiplicative_in_bottom(a, m, n):
    assert kronecker(a, m * n) == kronecker(a, m) * kronecker(a, n)


def test_factorize_examples():
    assert list(factorize(432)) == [(2, 4), (3, 3)]
    assert list(factorize(1)) == []
    assert list(factorize(-19)) == [(19, 1)]


def test_factorize_roundtrip_to_a_million():
    for n in range(1, 10**6 + 1, 1):
        f = factorize(n)
        assert prod(p**e for p, e in f) == n
    ps = primes_up_to(1000)
    assert ps == [p for p in range(1000) if is_prime_naive(p)]


def test_factorize_against_trial_division():
    for n in list(range(2, 3000)) + [10**12 + 39, 600851475143, 999999000001 * 7]:
        assert dict(factorize(n).pairs) == trial_factor(n)


@given(st.integers(2, 2**40), st.integers(2, 2**20))
def test_factorize_large_products(a, b):
    n = a * b
    f = factorize(n)
    assert prod(p**e for p, e in f) == n
    assert all(is_prime(p) for p in f.primes())
    assert f.primes() == sorted(f.primes())


def test_factorize_large_prime():
    assert list(factorize(2**61 - 1)) == [(2**61 - 1, 1)]
    assert list(factorize((2**31 - 1) * (10**9 + 7))) == [(10**9 + 7, 1), (2**31 - 1, 1)]


def test_factorize_cap():
    with pytest.raises(TooLargeError):
        factorize(2**64 + 1)


@pytest.mark.parametrize("d,want", [(8, True), (9, False), (-4, True), (1, False), (5, True), (12, True), (-8, True), (-16, False)])
def test_fundamental_examples(d, want):
    assert is_fundamental_discriminant(d) is want


def test_fundamental_matches_definition():
    for d in range(-2000, 2001):
        if d:
            assert is_fundamental_discriminant(d) == fundamental_naive(d), d


def test_fundamental_density():
    X = 10**6
    count = len(fundamental_discriminants(1, X))
    assert abs(count / X - 3 / pi**2) / (3 / pi**2) < 0.02


def test_field_discriminant():
    assert field_discriminant(-69) == -276
    assert field_discriminant(-276) == -276
    assert field_discriminant(84) == 21
    assert field_discriminant(-28) == -7
    assert field_discriminant(2) == 8
    assert field_discriminant(9) == 1


@pytest.mark.parametrize("d,want", [(320, (5, 2)), (7, (7, 1)), (-432, (-432, 1)), (-64, (-1, 2))])
def test_sixth_power_free_core(d, want):
    assert sixth_power_free_core(d) == want


@pytest.mark.parametrize("pairs,want", [([(2, 3), (1, 8)], (17, 24)), ([(0, 1)], (0, 1)), ([(3, 9), (1, 5)], (21, 45)), ([(1, 4), (3, 6)], (9, 12))])
def test_crt(pairs, want):
    assert crt(pairs) == want


def test_crt_inconsistent():
    with pytest.raises(ValueError):
        crt([(1, 4), (2, 6)])


@given(st.lists(st.tuples(st.integers(0, 1000), st.integers(1, 60)), min_size=1, max_size=4))
def test_crt_against_enumeration(pairs):
    pairs = [(r % m, m) for r, m in pairs]
    from math import lcm

    L = lcm(*(m for _, m in pairs))
    sols = [x for x in range(L) if all(x % m == r for r, m in pairs)]
    if sols:
        assert crt(pairs) == (sols[0], L)
    else:
        with pytest.raises(ValueError):
            crt(pairs)


def test_valuation():
    assert valuation(432, 3) == 3
    assert valuation(Fraction(-1, 3), 3) == -1
    assert valuation(0, 5) == float("inf")


def test_divisors():
    assert divisors(12) == [1, 2, 3, 4, 6, 12]


def test_modular_square_roots():
    for p in [3, 5, 7, 13, 17, 97, 101, 1009]:
        for a in range(1, p):
            if kronecker(a, p) == 1:
                r = sqrt_mod_prime(a, p)
                assert r * r % p == a
    for a, k in [(-23, 10), (-2, 15), (-11, 30)]:
        r = hensel_sqrt(a, 3, k)
        assert (r * r - a) % 3**k == 0
