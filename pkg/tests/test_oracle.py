import math

import pytest

from multiquad import ProblemInstance, ResidueClass, SignPattern, arith
from multiquad.errors import CapacityError, DomainError, InsufficientPrimes
from multiquad.galois import build_group, degree
from multiquad.oracle import (
    chebotarev_histogram,
    degree_counts,
    degree_estimate,
    empirical_pattern_sum,
)
from multiquad.patterns import is_feasible, units

from conftest import euler

GOLDEN = [((2, 3), 24), ((5,), 5), ((7,), 3), ((2, 8), 8)]


def all_patterns(n):
    return [SignPattern.from_mask(v, n) for v in range(1 << n)]


def test_small_golden_tally():
    # primes in (10, 20] that are 1 mod 5: only 11, where (2/11) = -1, (3/11) = 1
    inst = ProblemInstance((2, 3), 5)
    rc = ResidueClass(1, 5)
    hit = empirical_pattern_sum(inst, SignPattern((-1, 1)), rc, 10)
    assert hit.prime_count == 1
    assert hit.log_weighted_sum == pytest.approx(math.log(11))
    assert hit.theory_main_term == pytest.approx(10 / 16)
    assert hit.range_prime_count == 4 and hit.excluded == 0
    for sp in (SignPattern((1, 1)), SignPattern((1, -1)), SignPattern((-1, -1))):
        rep = empirical_pattern_sum(inst, sp, rc, 10)
        assert rep.prime_count == 0 and rep.log_weighted_sum == 0.0


def test_hand_tally_agrees_with_euler():
    inst = ProblemInstance((2, 3, -1), 8)
    N = 5000
    for f in units(8):
        for sp in all_patterns(3):
            rep = empirical_pattern_sum(inst, sp, ResidueClass(f, 8), N)
            hits = [
                p for p in range(N + 1, 2 * N + 1)
                if arith.is_prime(p) and p % 8 == f and p % 3
                and tuple(euler(a, p) for a in inst.S) == sp.theta
            ]
            assert rep.prime_count == len(hits)
            assert rep.log_weighted_sum == pytest.approx(math.fsum(map(math.log, hits)))


def test_infeasible_pattern_is_empty():
    rep = empirical_pattern_sum(ProblemInstance((5,), 5), SignPattern((-1,)), ResidueClass(1, 5), 10**6)
    assert rep.prime_count == 0
    assert rep.constant_C == 0 and rep.theory_main_term == 0


def test_main_term_at_one_million():
    rep = empirical_pattern_sum(ProblemInstance((2, 3), 5), SignPattern((1, 1)), ResidueClass(1, 5), 10**6)
    assert rep.theory_main_term == pytest.approx(10**6 / 16)
    assert rep.relative_error < 0.1 and rep.passed


@pytest.mark.parametrize("S, d", [((2, 3), 8), ((5,), 5), ((-1, 3), 12), ((2, 7), 5)])
def test_zero_nonzero_dichotomy(S, d):
    inst = ProblemInstance(S, d)
    for f in units(d):
        rc = ResidueClass(f, d)
        for sp in all_patterns(inst.n):
            rep = empirical_pattern_sum(inst, sp, rc, 10**6)
            assert (rep.prime_count > 0) == is_feasible(inst, sp, rc)


@pytest.mark.parametrize("S, d", [((2, 3), 8), ((5,), 5)])
def test_histogram_near_uniform(S, d):
    inst = ProblemInstance(S, d)
    hist = chebotarev_histogram(inst, 10**6)
    G = build_group(inst)
    assert len(hist) == G.order
    assert set(hist) == set(G)
    assert hist.max_relative_deviation() < 0.1


def test_histogram_conservation():
    inst = ProblemInstance((2, 3, 35), 24)
    p_max = 200_000
    hist = chebotarev_histogram(inst, p_max)
    total = len(arith.sieve(0, p_max))
    assert hist.total + hist.excluded == total
    # excluded: 2, 3 (divide d), 5 and 7 (divide 35)
    assert hist.excluded == 4
    assert not hist.outside_group() and not hist.missing()
    assert sum(hist.frequencies().values()) == pytest.approx(1.0)


def test_histogram_keys_match_direct_frobenius():
    inst = ProblemInstance((-1, 2), 8)
    hist = chebotarev_histogram(inst, 2000)
    direct = {}
    for p in range(3, 2001):
        if arith.is_prime(p):
            key = (p % 8, tuple(euler(a, p) for a in inst.S))
            direct[key] = direct.get(key, 0) + 1
    assert {(g.f, g.signs.theta): c for g, c in hist.items()} == direct


@pytest.mark.parametrize("S, d", GOLDEN)
def test_degree_estimate_golden(S, d):
    inst = ProblemInstance(S, d)
    est = degree_estimate(inst, 10**6)
    assert abs(est - degree(inst)) / degree(inst) < 0.1


@pytest.mark.parametrize("S, d", GOLDEN)
def test_degree_estimator_consistency(S, d):
    inst = ProblemInstance(S, d)
    deg = degree(inst)
    errs = [abs(degree_estimate(inst, 10**k) - deg) / deg for k in (3, 4, 5, 6)]
    steps = sum(b <= a for a, b in zip(errs, errs[1:]))
    assert steps >= 2, errs


def test_degree_counts_direct():
    inst = ProblemInstance((2, 3), 24)
    total, split = degree_counts(inst, 3000)
    primes = [p for p in range(5, 3001) if arith.is_prime(p)]
    assert total == len(primes)
    assert split == sum(p % 24 == 1 and euler(2, p) == euler(3, p) == 1 for p in primes)


def test_insufficient_primes():
    with pytest.raises(InsufficientPrimes, match="100"):
        degree_estimate(ProblemInstance((2, 3), 1009), 100)


def test_bounds():
    inst = ProblemInstance((2,), 5)
    with pytest.raises(CapacityError):
        empirical_pattern_sum(inst, SignPattern((1,)), ResidueClass(1, 5), 10**9)
    with pytest.raises(DomainError):
        empirical_pattern_sum(inst, SignPattern((1,)), ResidueClass(1, 5), 0)
    with pytest.raises(CapacityError):
        chebotarev_histogram(inst, 10**9)
