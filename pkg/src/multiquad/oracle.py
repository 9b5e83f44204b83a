"""Empirical checks against actual primes: residue-pattern tallies in a
progression, Frobenius histograms, and a prime-counting degree estimator.

Excluded primes (p = 2, p | d, p | a_i) are skipped everywhere and counted
separately.
"""

from __future__ import annotations

import math
import os
from collections.abc import Mapping
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from . import _backend, arith
from .errors import CapacityError, ConsistencyError, DomainError, InsufficientPrimes
from .galois import GaloisElement, GaloisGroup, build_group
from .patterns import ResidueClass, SignPattern, main_term_constant
from .subsetlat import ProblemInstance

MAX_BOUND = 10**8
DEFAULT_TOLERANCE = 0.10
DEFAULT_PMAX = int(os.environ.get("MULTIQUAD_PMAX", 10**6))


def iter_admissible(inst: ProblemInstance, lo: int, hi: int) -> Iterator[tuple[np.ndarray, np.ndarray, np.ndarray, int]]:
    """Yield (primes, p mod d, sign masks, excluded count) per sieve segment
    over the admissible primes in (lo, hi]."""
    if hi > MAX_BOUND * 2:
        raise CapacityError(f"prime bound {hi} exceeds {2 * MAX_BOUND}")
    d = inst.d
    for chunk in arith.iter_prime_segments(lo, hi):
        keep = chunk != 2
        if d > 1:
            keep &= np.gcd(chunk, d) == 1
        primes = chunk[keep]
        residues, masks = _backend.symbol_codes(primes, inst.S, d)
        ok = masks >= 0
        yield primes[ok], residues[ok], masks[ok], len(chunk) - int(ok.sum())


@dataclass(frozen=True)
class EmpiricalReport:
    S: tuple[int, ...]
    d: int
    f: int
    theta: SignPattern
    N: int
    prime_count: int
    log_weighted_sum: float
    theory_main_term: float
    relative_error: float
    tolerance: float
    verdict: str
    constant_C: int
    density: Fraction
    range_prime_count: int
    expected_count: float
    excluded: int

    @property
    def range(self) -> tuple[int, int]:
        return self.N, 2 * self.N

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


def relative_error(observed: float, theory: float) -> float:
    return abs(observed - theory) / max(theory, 1.0)


def empirical_pattern_sum(
    inst: ProblemInstance,
    sp: SignPattern,
    rc: ResidueClass,
    N: int,
    tolerance: float = DEFAULT_TOLERANCE,
) -> EmpiricalReport:
    """Sum log p over primes N < p <= 2N with p = f mod d and (a_i/p) =
    theta_i for every i, compared with C * N / (2**n * phi(d))."""
    N = int(N)
    if N < 1:
        raise DomainError(f"N must be positive, got {N}")
    if N > MAX_BOUND:
        raise CapacityError(f"N = {N} exceeds {MAX_BOUND}")
    dens = main_term_constant(inst, sp, rc)
    target = sp.negative_mask
    count = 0
    in_range = 0
    excluded = 0
    partial = []
    for primes, residues, masks, skipped in iter_admissible(inst, N, 2 * N):
        in_range += len(primes) + skipped
        excluded += skipped
        hit = primes[(residues == rc.f % inst.d) & (masks == target)]
        count += len(hit)
        partial.append(float(np.log(hit.astype(np.float64)).sum()))
    log_sum = math.fsum(partial)
    theory = dens.constant_C * N / ((1 << inst.n) * arith.euler_phi(inst.d))
    err = relative_error(log_sum, theory)
    return EmpiricalReport(
        S=inst.S,
        d=inst.d,
        f=rc.f,
        theta=sp,
        N=N,
        prime_count=count,
        log_weighted_sum=log_sum,
        theory_main_term=theory,
        relative_error=err,
        tolerance=tolerance,
        verdict="pass" if err <= tolerance else "fail",
        constant_C=dens.constant_C,
        density=dens.density,
        range_prime_count=in_range,
        expected_count=float(dens.density) * in_range,
        excluded=excluded,
    )


class ChebotarevHistogram(Mapping):
    """Frobenius tallies over admissible primes up to ``p_max``.

    Behaves as a read-only mapping GaloisElement -> count, ordered by
    (f, negative-mask).
    """

    def __init__(self, group: GaloisGroup, counts: dict[tuple[int, int], int], p_max: int, excluded: int):
        self.group = group
        self.p_max = p_max
        self.excluded = excluded
        n = group.inst.n
        self._counts = {
            GaloisElement(group.inst, f, SignPattern.from_mask(v, n)): c
            for (f, v), c in sorted(counts.items())
        }

    def __getitem__(self, g: GaloisElement) -> int:
        return self._counts[g]

    def __iter__(self):
        return iter(self._counts)

    def __len__(self) -> int:
        return len(self._counts)

    @property
    def total(self) -> int:
        return sum(self._counts.values())

    def frequencies(self) -> dict[GaloisElement, float]:
        total = self.total
        return {g: c / total for g, c in self._counts.items()}

    def outside_group(self) -> list[GaloisElement]:
        return [g for g in self._counts if g not in self.group]

    def missing(self) -> list[GaloisElement]:
        return [g for g in self.group if g not in self._counts]

    def max_relative_deviation(self) -> float:
        """max over group elements of |freq - 1/order| * order."""
        order = self.group.order
        freqs = self.frequencies()
        return max(abs(freqs.get(g, 0.0) * order - 1.0) for g in self.group)


def chebotarev_histogram(inst: ProblemInstance, p_max: int, group: GaloisGroup | None = None) -> ChebotarevHistogram:
    p_max = int(p_max)
    if p_max > MAX_BOUND:
        raise CapacityError(f"P_max = {p_max} exceeds {MAX_BOUND}")
    if group is None:
        group = build_group(inst)
    n = inst.n
    counts: dict[tuple[int, int], int] = {}
    excluded = 0
    if p_max >= 2:
        for _, residues, masks, skipped in iter_admissible(inst, 0, p_max):
            excluded += skipped
            codes, freq = np.unique((residues << n) | masks, return_counts=True)
            for code, c in zip(codes.tolist(), freq.tolist()):
                key = (code >> n or inst.d, code & ((1 << n) - 1))
                counts[key] = counts.get(key, 0) + c
    hist = ChebotarevHistogram(group, counts, p_max, excluded)
    stray = hist.outside_group()
    if stray:
        raise ConsistencyError(f"Frobenius elements outside the group: {stray[:3]}")
    return hist


def degree_counts(inst: ProblemInstance, p_max: int) -> tuple[int, int]:
    """(admissible primes <= p_max, those with p = 1 mod d and every (a_i/p) = 1)."""
    p_max = int(p_max)
    if p_max > MAX_BOUND:
        raise CapacityError(f"P_max = {p_max} exceeds {MAX_BOUND}")
    total = split = 0
    if p_max >= 2:
        one = 1 % inst.d
        for _, residues, masks, _ in iter_admissible(inst, 0, p_max):
            total += len(residues)
            split += int(((residues == one) & (masks == 0)).sum())
    return total, split


def degree_estimate(inst: ProblemInstance, p_max: int) -> float:
    """Admissible primes divided by completely split primes, up to p_max."""
    total, split = degree_counts(inst, p_max)
    if split == 0:
        raise InsufficientPrimes(
            f"no prime p <= {p_max} with p = 1 mod {inst.d} and all (a_i/p) = 1"
        )
    return total / split
