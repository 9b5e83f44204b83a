"""Exit criteria for the library, runnable from tests and ``multiquad verify``.

Each criterion returns a ``CriterionResult``; none of them raises on a
mathematical failure. Exact criteria recompute their expected values with
independent brute force (Euler's criterion, direct products, gcd arithmetic)
rather than through the code under test.
"""

from __future__ import annotations

import math
import random
import sys
import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable

import numpy as np

from . import arith
from .galois import admissibility_error, build_group, cancellation, degree, frobenius
from .oracle import chebotarev_histogram, degree_estimate, empirical_pattern_sum
from .patterns import (
    ResidueClass,
    SignPattern,
    count_pattern_group,
    enumerate_pattern_group,
    is_feasible,
    symbol_on_class,
    units,
)
from .subsetlat import (
    ProblemInstance,
    SubgroupClass,
    active_class,
    coset_decomposition,
    in_class,
    sqf_of_subset,
    subgroup,
)

TOLERANCE = 0.10

# (S, d, degree, containment argument)
GOLDEN_DEGREES = (
    ((2, 3), 24, 8, "sqrt2, sqrt3 in Q(zeta_24), so K = Q(zeta_24)"),
    ((5,), 5, 4, "sqrt5 in Q(zeta_5), so K = Q(zeta_5)"),
    ((7,), 3, 4, "Q(sqrt7) and Q(zeta_3) are disjoint"),
    ((2, 8), 8, 4, "sqrt2 = sqrt8 / 2 in Q(zeta_8), so K = Q(zeta_8)"),
)

COUNTING_POOL = (-1, 2, 3, 5, 6, 7, 10, -2)
COUNTING_MODULI = (3, 4, 5, 8, 12, 15, 24, 40)


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0
    failures: list[str] = field(default_factory=list)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number}: {self.title} ({self.seconds:.2f}s) {self.detail}"


def _timed(fn: Callable[..., CriterionResult]) -> Callable[..., CriterionResult]:
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t0
        return res

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _progress(msg: str, verbose: bool) -> None:
    if verbose:
        print(msg, file=sys.stderr, flush=True)


@_timed
def degree_formula(p_max: int = 10**6, tolerance: float = TOLERANCE, time_limit: float = 10.0, verbose: bool = False) -> CriterionResult:
    failures = []
    worst = 0.0
    for S, d, expected, why in GOLDEN_DEGREES:
        t0 = time.perf_counter()
        inst = ProblemInstance(S, d)
        got = degree(inst)
        if got != expected:
            failures.append(f"S={S} d={d}: degree {got} != {expected} ({why})")
        est = degree_estimate(inst, p_max)
        err = abs(est - expected) / expected
        worst = max(worst, err)
        if err > tolerance:
            failures.append(f"S={S} d={d}: estimate {est:.4f} off by {err:.3%}")
        elapsed = time.perf_counter() - t0
        if elapsed > time_limit:
            failures.append(f"S={S} d={d}: took {elapsed:.1f}s")
        _progress(f"  degree S={S} d={d}: {got}, estimate {est:.4f}", verbose)
    return CriterionResult(1, "degree formula", not failures, f"worst estimator error {worst:.3%}", failures=failures)


def _brute_pattern_group(inst: ProblemInstance) -> set[tuple[int, int]]:
    """All (f, negative-mask) with theta(T) = (sqf(T)/p) for every T in the
    active subgroup, symbols read off the least prime p = f mod d."""
    d, n = inst.d, inst.n
    cls = active_class(d)
    members = []
    for T in range(1 << n):
        prod = 1
        for i, a in enumerate(inst.S):
            if T >> i & 1:
                prod *= a
        s = arith.sqf(prod)
        if in_class(s, d, cls):
            members.append((T, s))
    out = set()
    for f in units(d):
        p = _least_prime_in_class(f, d)
        symbols = [_euler(s, p) for _, s in members]
        for v in range(1 << n):
            if all(
                (-1 if bin(T & v).count("1") & 1 else 1) == sym
                for (T, _), sym in zip(members, symbols)
            ):
                out.add((f, v))
    return out


def _least_prime_in_class(f: int, d: int, start: int = 3) -> int:
    p = f
    while p < start or not arith.is_prime(p):
        p += d
    return p


def _euler(a: int, p: int) -> int:
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


@_timed
def counting_theorem(time_limit: float = 60.0, verbose: bool = False) -> CriterionResult:
    failures = []
    checked = 0
    t0 = time.perf_counter()
    for k in range(5):
        for S in combinations(COUNTING_POOL, k):
            for d in COUNTING_MODULI:
                inst = ProblemInstance(S, d)
                closed = count_pattern_group(inst)
                enumerated = {(g.rc.f, g.sp.negative_mask) for g in enumerate_pattern_group(inst)}
                brute = _brute_pattern_group(inst)
                if len(enumerated) != closed or enumerated != brute:
                    failures.append(f"S={S} d={d}: closed {closed}, enumerated {len(enumerated)}, brute {len(brute)}")
                checked += 1
    elapsed = time.perf_counter() - t0
    if elapsed > time_limit:
        failures.append(f"took {elapsed:.1f}s > {time_limit}s")
    return CriterionResult(2, "counting theorem", not failures, f"{checked} instances", failures=failures)


@_timed
def isomorphism(p_member: int = 10**5, p_max: int = 10**6, tolerance: float = TOLERANCE, verbose: bool = False) -> CriterionResult:
    failures = []
    worst = 0.0
    for S, d, _, _ in GOLDEN_DEGREES:
        inst = ProblemInstance(S, d)
        group = build_group(inst)
        for p in arith.sieve(2, p_member):
            if admissibility_error(inst, p):
                continue
            g = frobenius(inst, p)
            if g not in group:
                failures.append(f"S={S} d={d}: Frobenius at {p} = {g} not in group")
                break
        hist = chebotarev_histogram(inst, p_max, group)
        missing = hist.missing()
        if missing:
            failures.append(f"S={S} d={d}: {len(missing)} elements never hit below {p_max}")
        if hist.outside_group():
            failures.append(f"S={S} d={d}: histogram has keys outside the group")
        dev = hist.max_relative_deviation()
        worst = max(worst, dev)
        if dev > tolerance:
            failures.append(f"S={S} d={d}: frequency deviation {dev:.3%}")
        _progress(f"  chebotarev S={S} d={d}: order {group.order}, deviation {dev:.3%}", verbose)
    return CriterionResult(3, "explicit isomorphism", not failures, f"worst frequency deviation {worst:.3%}", failures=failures)


@_timed
def main_term(N: int = 10**6, tolerance: float = TOLERANCE, time_limit: float = 30.0, verbose: bool = False) -> CriterionResult:
    inst = ProblemInstance((2, 3), 8)
    failures = []
    worst = 0.0
    feasible = 0
    t0 = time.perf_counter()
    for f in units(8):
        rc = ResidueClass(f, 8)
        for v in range(4):
            sp = SignPattern.from_mask(v, 2)
            rep = empirical_pattern_sum(inst, sp, rc, N, tolerance)
            if is_feasible(inst, sp, rc):
                feasible += 1
                worst = max(worst, rep.relative_error)
                if rep.relative_error > tolerance:
                    failures.append(f"f={f} theta={sp}: relative error {rep.relative_error:.3%}")
            elif rep.prime_count != 0:
                failures.append(f"f={f} theta={sp}: infeasible but {rep.prime_count} primes")
    elapsed = time.perf_counter() - t0
    if elapsed > time_limit:
        failures.append(f"took {elapsed:.1f}s > {time_limit}s")
    return CriterionResult(4, "main term", not failures, f"{feasible} feasible pairs, worst error {worst:.3%}", failures=failures)


def _direct_sqf_table(S: tuple[int, ...]) -> np.ndarray:
    n = len(S)
    out = np.empty(1 << n, dtype=np.int64)
    for T in range(1 << n):
        prod = 1
        for i, a in enumerate(S):
            if T >> i & 1:
                prod *= a
        out[T] = arith.sqf(prod)
    return out


def _structure_instances(seed: int = 20240517, per_n: int = 4) -> list[ProblemInstance]:
    rng = random.Random(seed)
    pool = [a for a in range(-30, 31) if a]
    moduli = (1, 3, 4, 5, 8, 12, 15, 20, 24, 40, 60, 105, 120, 840)
    out = []
    for n in range(1, 11):
        for _ in range(per_n):
            S = tuple(rng.choice(pool) for _ in range(n))
            out.append(ProblemInstance(S, rng.choice(moduli)))
    out.append(ProblemInstance((2, 3, 6, -1, -2, -3, -6, 5, 10, 15), 120))
    out.append(ProblemInstance((4, 9, 2, 8, 18, 3, 12, 27, 6, 24), 24))
    return out


def structure_failures(inst: ProblemInstance) -> list[str]:
    """Every exact subgroup/coset property for one instance, checked
    exhaustively against directly computed squarefree parts."""
    n, d = inst.n, inst.d
    size = 1 << n
    fails = []
    direct = _direct_sqf_table(inst.S)
    lib = np.array([sqf_of_subset(inst, T) for T in range(size)], dtype=np.int64)
    if not np.array_equal(direct, lib):
        fails.append("sqf_of_subset disagrees with the direct product")
    subs = {}
    for cls in SubgroupClass:
        sub = subgroup(inst, cls)
        expect = [T for T in range(size) if in_class(int(direct[T]), d, cls)]
        if list(sub.members) != expect:
            fails.append(f"{cls} membership differs from its defining predicate")
        arr = np.asarray(sub.members, dtype=np.int64)
        if 0 not in sub or not np.isin(arr[:, None] ^ arr[None, :], arr).all():
            fails.append(f"{cls} not closed under xor")
        subs[cls] = set(sub.members)
    D0, D1, D2, H = (subs[c] for c in SubgroupClass)
    if not (D2 <= D1 <= D0):
        fails.append("nesting D2 <= D1 <= D0 fails")
    idx01 = len(D0) // len(D1)
    has_two = any(int(direct[T]) % 4 == 2 for T in D0)
    if len(D0) % len(D1) or idx01 not in (1, 2) or (idx01 == 2) != has_two:
        fails.append(f"index [D0:D1] = {len(D0) / len(D1)} with sqf = 2 mod 4 present: {has_two}")
    idx12 = len(D1) // len(D2)
    has_three = any(int(direct[T]) % 4 == 3 for T in D1)
    if len(D1) % len(D2) or idx12 not in (1, 2) or (idx12 == 2) != has_three:
        fails.append(f"index [D1:D2] = {len(D1) / len(D2)} with sqf = 3 mod 4 present: {has_three}")
    # sqf(T1 xor T2) = sqf(sqf(T1) sqf(T2)) = a*b / gcd(a, b)**2 for squarefree a, b
    t = np.arange(size, dtype=np.int64)
    a = direct[:, None]
    b = direct[None, :]
    g = np.gcd(a, b)
    if not np.array_equal(direct[t[:, None] ^ t[None, :]], (a // g) * (b // g)):
        fails.append("cocycle identity fails")
    dec = coset_decomposition(inst, subgroup(inst, SubgroupClass.H))
    label = np.empty(size, dtype=np.int64)
    for k, c in enumerate(dec.cosets):
        label[list(c.members)] = k
        if c.common_sqf is None or any(int(direct[T]) != c.common_sqf for T in c.members):
            fails.append(f"coset of {c.representative} lacks a common sqf")
    _, by_sqf = np.unique(direct, return_inverse=True)
    # same coset <=> same sqf: both labellings must induce the same partition
    pairs = set(zip(label.tolist(), by_sqf.tolist()))
    if len(pairs) != len(dec.cosets) or len(dec.cosets) != len(set(by_sqf.tolist())):
        fails.append("H-cosets and sqf classes differ")
    return fails


@_timed
def subgroup_structure(verbose: bool = False) -> CriterionResult:
    failures = []
    instances = _structure_instances()
    for inst in instances:
        for msg in structure_failures(inst):
            failures.append(f"S={inst.S} d={inst.d}: {msg}")
    return CriterionResult(5, "subgroup and coset structure", not failures, f"{len(instances)} instances, n <= 10", failures=failures)


@_timed
def cancellation_identity(count: int = 50, seed: int = 8675309, verbose: bool = False) -> CriterionResult:
    rng = random.Random(seed)
    pool = [a for a in range(-60, 61) if a]
    failures = []
    for _ in range(count):
        n = rng.randint(1, 8)
        S = tuple(rng.choice(pool) for _ in range(n))
        d = rng.randint(3, 120)
        inst = ProblemInstance(S, d)
        rep = cancellation(inst)
        full = (1 << n) * arith.euler_phi(d)
        if rep.degree * rep.quotient_order * rep.h_order != full:
            failures.append(f"S={S} d={d}: {rep}")
    return CriterionResult(6, "cancellation identity", not failures, f"{count} random instances", failures=failures)


def _squarefree_values(bound: int) -> list[int]:
    out = []
    for s in range(-bound, bound + 1):
        if s and all(abs(s) % (q * q) for q in range(2, math.isqrt(abs(s)) + 1)):
            out.append(s)
    return out


@_timed
def symbol_oracle(s_bound: int = 30, d_bound: int = 120, samples: int = 20, prime_bound: int = 200_000, seed: int = 1729, verbose: bool = False) -> CriterionResult:
    rng = random.Random(seed)
    primes = arith.sieve(2, prime_bound).primes
    failures = []
    classes = 0
    svals = _squarefree_values(s_bound)
    for d in range(1, d_bound + 1):
        res = primes % d
        for f in units(d):
            bucket = primes[res == f % d]
            rc = ResidueClass(f, d)
            chosen = None
            for s in svals:
                r = s % 4
                if d % abs(s) or not (r == 1 or (r == 3 and d % 4 == 0) or (r == 2 and d % 8 == 0)):
                    continue
                if chosen is None:
                    if len(bucket) < samples:
                        failures.append(f"only {len(bucket)} primes = {f} mod {d}")
                        break
                    chosen = [int(p) for p in rng.sample(list(bucket), samples)]
                value = symbol_on_class(s, rc)
                classes += 1
                for p in chosen:
                    if _euler(s, p) != value:
                        failures.append(f"s={s} f={f} d={d}: class value {value}, ({s}/{p}) = {_euler(s, p)}")
                        break
    return CriterionResult(7, "symbol oracle", not failures, f"{classes} (s, f, d) triples x {samples} primes", failures=failures)


def run_all(p_max: int = 10**6, verbose: bool = False) -> list[CriterionResult]:
    """All criteria; p_max scales the statistical ones (membership scan at p_max / 10)."""
    steps = [
        lambda: degree_formula(p_max=p_max, verbose=verbose),
        lambda: counting_theorem(verbose=verbose),
        lambda: isomorphism(p_member=max(p_max // 10, 100), p_max=p_max, verbose=verbose),
        lambda: main_term(N=p_max, verbose=verbose),
        lambda: subgroup_structure(verbose=verbose),
        lambda: cancellation_identity(verbose=verbose),
        lambda: symbol_oracle(verbose=verbose),
    ]
    results = []
    for step in steps:
        res = step()
        _progress(res.line(), verbose)
        results.append(res)
    return results
