import random
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multiquad import ProblemInstance, SubgroupClass, coset_decomposition, subgroup
from multiquad.errors import CapacityError, DomainError
from multiquad.subsetlat import (
    MAX_N,
    active_class,
    index_of,
    quotient_order,
    signature_table,
    sqf_of_subset,
)

D0, D1, D2, H = SubgroupClass.D0, SubgroupClass.D1, SubgroupClass.D2, SubgroupClass.H


def exponents(n: int) -> Counter:
    out = Counter()
    m = abs(n)
    p = 2
    while p * p <= m:
        while m % p == 0:
            out[p] += 1
            m //= p
        p += 1
    if m > 1:
        out[m] += 1
    return out


def brute_sqf_table(S) -> list[int]:
    """sqf of every subset product by merging prime exponents mod 2."""
    parts = [exponents(a) for a in S]
    out = []
    for T in range(1 << len(S)):
        exp = Counter()
        sign = 1
        for i, a in enumerate(S):
            if T >> i & 1:
                exp.update(parts[i])
                sign *= -1 if a < 0 else 1
        val = sign
        for p, e in exp.items():
            if e % 2:
                val *= p
        out.append(val)
    return out


def brute_member(s: int, d: int, cls) -> bool:
    if cls is H:
        return s == 1
    if d % abs(s):
        return False
    return cls is D0 or (cls is D1 and s % 2 == 1) or (cls is D2 and s % 4 == 1)


def random_instance(rng: random.Random, n: int, d: int) -> ProblemInstance:
    pool = [-1, 2, -2, 3, -3, 5, 6, 7, 10, -15, 12, 4, 9, 8, 30, 21, -6, 11, 13, 14]
    return ProblemInstance(tuple(rng.choice(pool) for _ in range(n)), d)


@pytest.mark.parametrize(
    "S, T, expected",
    [((6, 10, 15), 0b011, 15), ((6, 10, 15), 0, 1), ((6, 10, 15), 0b111, 1), ((2, 3), 0b11, 6), ((-1, -3), 0b11, 3), ((-8,), 1, -2)],
)
def test_sqf_of_subset_examples(S, T, expected):
    assert sqf_of_subset(ProblemInstance(S, 1), T) == expected


@pytest.mark.parametrize("d, cls", [(5, D2), (12, D1), (24, D0), (1, D2), (2, D2), (4, D1), (8, D0)])
def test_active_class(d, cls):
    assert active_class(d) is cls


@pytest.mark.parametrize(
    "S, d, cls, members",
    [((2, 3), 8, D0, (0, 1)), ((5,), 5, D2, (0, 1)), ((3,), 3, D2, (0,)), ((2, 8), 8, H, (0, 3)), ((2, 3), 24, D0, (0, 1, 2, 3))],
)
def test_subgroup_examples(S, d, cls, members):
    assert subgroup(ProblemInstance(S, d), cls).members == members


def test_coset_examples():
    inst = ProblemInstance((2, 8, 3), 1)
    dec = coset_decomposition(inst, subgroup(inst, H))
    c = dec.coset_of(0b001)
    assert c.members == (0b001, 0b010) and c.common_sqf == 2
    assert dec.coset_of(0).members == subgroup(inst, H).members
    assert dec.coset_of(0).common_sqf == 1
    inst = ProblemInstance((2, 3), 1)
    c = coset_decomposition(inst, subgroup(inst, H)).coset_of(0b11)
    assert c.members == (0b11,) and c.common_sqf == 6


@pytest.mark.parametrize("S, d, expected", [((2, 8), 8, 2), ((2, 3), 8, 2), ((4,), 8, 1), ((4,), 3, 1)])
def test_quotient_order_examples(S, d, expected):
    assert quotient_order(ProblemInstance(S, d), active_class(d)) == expected


def test_subgroups_match_definition():
    rng = random.Random(11)
    for n in range(0, 9):
        for d in (1, 3, 4, 5, 8, 12, 24, 40, 120, 168):
            inst = random_instance(rng, n, d)
            table = brute_sqf_table(inst.S)
            assert [sqf_of_subset(inst, T) for T in range(1 << n)] == table
            for cls in SubgroupClass:
                expected = tuple(T for T in range(1 << n) if brute_member(table[T], d, cls))
                assert subgroup(inst, cls).members == expected, (inst, cls)


def test_nesting_and_index_dichotomy():
    rng = random.Random(5)
    for _ in range(300):
        inst = random_instance(rng, rng.randint(0, 10), rng.choice([3, 5, 8, 12, 16, 24, 40, 60, 120]))
        d0, d1, d2, h = (subgroup(inst, c) for c in (D0, D1, D2, H))
        assert set(d2) <= set(d1) <= set(d0)
        assert set(h) <= set(d2)
        two = any(sqf_of_subset(inst, T) % 4 == 2 for T in d0)
        three = any(sqf_of_subset(inst, T) % 4 == 3 for T in d1)
        assert index_of(d0, d1) == (2 if two else 1)
        assert index_of(d1, d2) == (2 if three else 1)


def test_cocycle_exhaustive_n12():
    inst = ProblemInstance((2, -3, 5, 6, 7, -10, 14, 15, 3, 21, -1, 35), 1)
    sq = np.array(brute_sqf_table(inst.S), dtype=np.int64)
    assert np.array_equal(sq, np.array([sqf_of_subset(inst, T) for T in range(1 << 12)]))
    masks = np.arange(1 << 12)
    for T1 in range(1 << 12):
        a, b = sq[T1], sq
        g = np.gcd(a, b)
        expected = (a // g) * (b // g)  # sqf(a*b) for squarefree a, b
        assert np.array_equal(sq[masks ^ T1], expected)


def test_coset_law_exhaustive_n12():
    inst = ProblemInstance((2, 8, 3, 12, 5, 20, 45, -1, -4, 6, 10, 15), 1)
    table = brute_sqf_table(inst.S)
    dec = coset_decomposition(inst, subgroup(inst, H))
    label = {}
    for k, c in enumerate(dec.cosets):
        assert c.representative == min(c.members)
        for T in c.members:
            assert T not in label
            label[T] = k
            assert table[T] == c.common_sqf
    assert len(label) == 1 << 12
    values = {c.common_sqf for c in dec.cosets}
    assert len(values) == len(dec)


def test_tau_maps_are_homomorphisms():
    rng = random.Random(2)
    for _ in range(20):
        inst = random_instance(rng, rng.randint(1, 10), 120)
        d0 = subgroup(inst, D0).members
        d1 = subgroup(inst, D1).members
        tau1 = {T: -1 if sqf_of_subset(inst, T) % 2 == 0 else 1 for T in d0}
        tau2 = {T: 1 if sqf_of_subset(inst, T) % 4 == 1 else -1 for T in d1}
        for A in d0:
            for B in d0:
                assert tau1[A ^ B] == tau1[A] * tau1[B]
        for A in d1:
            for B in d1:
                assert tau2[A ^ B] == tau2[A] * tau2[B]


def test_basis_spans_subgroup():
    inst = ProblemInstance((2, 3, 6, 5, 10, -1, 7), 840)
    for cls in SubgroupClass:
        sub = subgroup(inst, cls)
        span = {0}
        for b in sub.basis:
            span |= {x ^ b for x in span}
        assert span == set(sub) and len(sub) == 1 << len(sub.basis)


def test_large_n_capacity():
    S = tuple(range(2, 2 + MAX_N))
    inst = ProblemInstance(S, 1)
    assert signature_table(inst).shape[0] == 1 << MAX_N
    with pytest.raises(CapacityError):
        ProblemInstance(tuple(range(2, 3 + MAX_N)), 1)


def test_instance_validation():
    with pytest.raises(DomainError):
        ProblemInstance((2, 0), 5)
    with pytest.raises(DomainError):
        ProblemInstance((2,), 0)
    with pytest.raises(DomainError):
        sqf_of_subset(ProblemInstance((2,), 5), 0b10)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-40, 40).filter(bool), max_size=7), st.integers(1, 200))
def test_cosets_partition(S, d):
    inst = ProblemInstance(tuple(S), d)
    for cls in SubgroupClass:
        sub = subgroup(inst, cls)
        dec = coset_decomposition(inst, sub)
        seen = sorted(T for c in dec.cosets for T in c.members)
        assert seen == list(range(1 << inst.n))
        assert len(dec) * len(sub) == 1 << inst.n
        reps = [c.representative for c in dec.cosets]
        assert reps == sorted(reps)
