import math
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multiquad import arith
from multiquad.errors import CapacityError, DomainError

from conftest import euler, primes_upto

SMALL_PRIMES = primes_upto(10_000)
ODD_PRIMES = SMALL_PRIMES[1:]


def brute_jacobi(a: int, n: int) -> int:
    """Jacobi symbol for odd n > 0 as a product of Euler-criterion values."""
    out = 1
    m = n
    for p in SMALL_PRIMES[1:]:
        while m % p == 0:
            out *= euler(a, p)
            m //= p
        if m == 1:
            break
    return out


def brute_kronecker(a: int, n: int) -> int:
    """Kronecker symbol straight from its definition."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    out = 1
    if n < 0:
        n = -n
        if a < 0:
            out = -1
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        out *= 1 if a % 8 in (1, 7) else -1
    return out * brute_jacobi(a, n)


@pytest.mark.parametrize(
    "n, sign, factors",
    [(12, 1, ((2, 2), (3, 1))), (1, 1, ()), (-8, -1, ((2, 3),))],
)
def test_factor_examples(n, sign, factors):
    fi = arith.factor(n)
    assert fi.sign == sign
    assert tuple(fi.factors) == factors
    assert fi.value == n


@pytest.mark.parametrize("n, expected", [(12, 3), (49, 1), (-8, -2), (-1, -1), (1, 1), (-12, -3)])
def test_sqf_examples(n, expected):
    assert arith.sqf(n) == expected


@pytest.mark.parametrize("d, expected", [(1, 1), (8, 4), (24, 8), (2, 1), (97, 96), (120, 32)])
def test_euler_phi(d, expected):
    assert arith.euler_phi(d) == expected


def test_euler_phi_counts_units():
    for d in range(1, 300):
        assert arith.euler_phi(d) == sum(math.gcd(k, d) == 1 for k in range(1, d + 1))


@pytest.mark.parametrize("a, n, expected", [(1, 7, 1), (5, 3, -1), (-3, 7, 1)])
def test_kronecker_examples(a, n, expected):
    assert arith.kronecker(a, n) == expected


@pytest.mark.parametrize("s, expected", [(5, 5), (3, 12), (-2, -8), (1, 1), (-1, -4), (-3, -3), (6, 24)])
def test_fundamental_discriminant(s, expected):
    assert arith.fundamental_discriminant(s) == expected


def test_fundamental_discriminant_rejects_nonsquarefree():
    with pytest.raises(DomainError):
        arith.fundamental_discriminant(12)


def test_kronecker_matches_definition():
    for a in range(-60, 61):
        for n in range(-60, 61):
            assert arith.kronecker(a, n) == brute_kronecker(a, n), (a, n)


def test_kronecker_multiplicative_in_numerator():
    grid = range(-50, 51)
    bad = [(a, b, n) for a, b, n in product(grid, grid, grid) if arith.kronecker(a * b, n) != arith.kronecker(a, n) * arith.kronecker(b, n)]
    # the sign rule gives (0/-1) = 1, so only a zero factor over n = -1 breaks it
    assert bad
    assert all(n == -1 and 0 in (a, b) for a, b, n in bad)


def test_kronecker_multiplicative_in_denominator():
    grid = range(-50, 51)
    bad = [(a, m, n) for a, m, n in product(grid, grid, grid) if arith.kronecker(a, m * n) != arith.kronecker(a, m) * arith.kronecker(a, n)]
    # (+-1/0) = 1 while (-1/m) can be -1, so only a zero denominator breaks it
    assert all(0 in (m, n) and a in (-1, 1) for a, m, n in bad)


def test_legendre_agrees_with_euler():
    for p in ODD_PRIMES[::7] + [9973]:
        for a in range(-p, 2 * p, max(1, p // 97)):
            if a % p:
                assert arith.kronecker(a, p) == euler(a, p)
                assert arith.legendre(a, p) == euler(a, p)


def test_legendre_agrees_with_euler_every_prime_small_a():
    for p in ODD_PRIMES:
        for a in (-7, -3, -2, -1, 2, 3, 5, 6, 7, 10, 11):
            if a % p:
                assert arith.kronecker(a, p) == euler(a, p)


def test_legendre_rejects_even_modulus():
    with pytest.raises(DomainError):
        arith.legendre(3, 2)


def test_character_periodicity():
    for s in range(-30, 31):
        if not s or not arith.is_squarefree(s):
            continue
        D = arith.fundamental_discriminant(s)
        for f in range(-200, 200):
            assert arith.kronecker(D, f) == arith.kronecker(D, f + abs(D))
        for p in ODD_PRIMES:
            if (2 * s) % p:
                assert arith.kronecker(D, p) == arith.kronecker(s, p)


@pytest.mark.parametrize("lo, hi, expected", [(0, 10, [2, 3, 5, 7]), (10, 20, [11, 13, 17, 19]), (7, 11, [11]), (0, 2, [2])])
def test_sieve_examples(lo, hi, expected):
    assert arith.sieve(lo, hi).tolist() == expected


def test_sieve_matches_trial_division():
    expected = SMALL_PRIMES + [p for p in range(10_001, 100_001) if arith.is_prime(p)]
    trial = [p for p in range(2, 100_001) if all(p % q for q in SMALL_PRIMES if q * q <= p)]
    assert trial == expected
    assert arith.sieve(0, 100_000).tolist() == trial
    # awkward segment boundaries
    assert arith.sieve(31_337, 77_777, segment=1000).tolist() == [p for p in trial if 31_337 < p <= 77_777]


def test_sieve_large_window():
    got = arith.sieve(10**9 - 1000, 10**9).tolist()
    assert got == [p for p in range(10**9 - 999, 10**9 + 1) if arith.is_prime(p)]
    assert got[-1] == 999_999_937


@pytest.mark.parametrize("lo, hi", [(100, 100), (50, 10), (-1, 10)])
def test_sieve_bad_range(lo, hi):
    with pytest.raises(DomainError):
        arith.sieve(lo, hi)


def test_sieve_capacity():
    with pytest.raises(CapacityError):
        arith.sieve(0, 10**9 + 1)
    # an oversized range is also a domain error
    with pytest.raises(DomainError):
        arith.sieve(0, 10**9 + 1)


def test_factor_errors():
    with pytest.raises(DomainError):
        arith.factor(0)
    with pytest.raises(DomainError):
        arith.sqf(0)
    with pytest.raises(CapacityError):
        arith.factor(2**63)
    with pytest.raises(DomainError):
        arith.euler_phi(0)


def test_factor_large_semiprimes():
    for p, q in [(4_294_967_291, 1_000_000_007), (1_000_000_007, 998_244_353), (65_537, 2_147_483_647)]:
        fi = arith.factor(p * q)
        assert fi.value == p * q
        assert sorted(fi.primes) == sorted({p, q})
    assert arith.factor(2**63 - 1).value == 2**63 - 1
    assert arith.factor(-(3**39)).factors == ((3, 39),)


def test_is_prime_against_sieve():
    primes = set(arith.sieve(0, 50_000).tolist())
    assert all(arith.is_prime(n) == (n in primes) for n in range(-5, 50_001))
    # strong pseudoprimes to several small bases
    for n in (3_215_031_751, 2_152_302_898_747, 3_474_749_660_383, 341_550_071_728_321):
        assert not arith.is_prime(n)


nonzero = st.integers(min_value=-(10**9), max_value=10**9).filter(bool)


@given(nonzero)
def test_sqf_idempotent(n):
    s = arith.sqf(n)
    assert arith.sqf(s) == s
    assert arith.is_squarefree(s)
    assert (s < 0) == (n < 0)
    q, r = divmod(n, s)
    assert r == 0 and math.isqrt(q) ** 2 == q


@settings(max_examples=200)
@given(nonzero, st.integers(min_value=1, max_value=3000))
def test_sqf_absorbs_squares(n, m):
    assert arith.sqf(n * m * m) == arith.sqf(n)


@given(st.integers(min_value=-(2**62), max_value=2**62).filter(bool))
def test_factor_round_trip(n):
    fi = arith.factor(n)
    assert fi.value == n
    assert all(arith.is_prime(p) and e > 0 for p, e in fi.factors)
    assert list(fi.primes) == sorted(fi.primes)
