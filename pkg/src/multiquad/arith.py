"""Exact integer arithmetic: factorization, squarefree parts, quadratic symbols
and a segmented prime sieve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

from . import _backend
from .errors import CapacityError, DomainError

MAX_FACTOR = 2**63 - 1
MAX_SIEVE = 10**9
DEFAULT_SEGMENT = 1 << 18

# trial division covers every factor below this bound; above it we switch to rho
_TRIAL_BOUND = 1 << 16
_WHEEL_PRIMES = (2, 3, 5, 7)

# (a/2) by a mod 8
_KRONECKER_TWO = (0, 1, 0, -1, 0, -1, 0, 1)


def _build_wheel() -> tuple[int, ...]:
    modulus = 2 * 3 * 5 * 7
    spokes = [r for r in range(1, modulus + 1) if math.gcd(r, modulus) == 1]
    spokes.append(spokes[0] + modulus)
    return tuple(b - a for a, b in zip(spokes, spokes[1:]))


_WHEEL_GAPS = _build_wheel()


@dataclass(frozen=True)
class FactoredInt:
    """Sign and ordered prime factorization of a non-zero integer."""

    sign: int
    factors: tuple[tuple[int, int], ...]

    @property
    def value(self) -> int:
        v = self.sign
        for p, e in self.factors:
            v *= p**e
        return v

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def squarefree_part(self) -> int:
        v = self.sign
        for p, e in self.factors:
            if e & 1:
                v *= p
        return v

    def __int__(self) -> int:
        return self.value


@dataclass(frozen=True)
class PrimeRange:
    """The primes in the half-open interval (lo, hi]."""

    lo: int
    hi: int
    primes: np.ndarray

    def __len__(self) -> int:
        return len(self.primes)

    def __iter__(self):
        return (int(p) for p in self.primes)

    def tolist(self) -> list[int]:
        return [int(p) for p in self.primes]


def _check_nonzero(n: int, what: str = "n") -> int:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise DomainError(f"{what} must be an integer, got {n!r}")
    n = int(n)
    if n == 0:
        raise DomainError(f"{what} must be non-zero")
    return n


def _is_probable_prime(n: int) -> bool:
    # deterministic for n < 3.3e24 with these bases
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def is_prime(n: int) -> bool:
    """Deterministic primality test for 64-bit integers."""
    return _is_probable_prime(int(n))


def _pollard_brent(n: int) -> int:
    """Return a non-trivial factor of the odd composite ``n``."""
    for c in range(1, n):
        y, r, q, g = 2, 1, 1, 1
        x = ys = 0
        m = 128
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise AssertionError(f"rho failed on {n}")


def _split_large(n: int, out: dict[int, int]) -> None:
    if n == 1:
        return
    if _is_probable_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    r = math.isqrt(n)
    if r * r == n:
        _split_large(r, out)
        _split_large(r, out)
        return
    g = _pollard_brent(n)
    _split_large(g, out)
    _split_large(n // g, out)


@lru_cache(maxsize=4096)
def factor(n: int) -> FactoredInt:
    """Factor a non-zero integer with ``|n| <= 2**63 - 1``.

    Small factors are removed by wheel trial division; a cofactor left over
    after the trial bound is split with Miller-Rabin (deterministic bases) and
    Pollard-Brent.
    """
    n = _check_nonzero(n)
    if abs(n) > MAX_FACTOR:
        raise CapacityError(f"|{n}| exceeds factorization limit 2**63-1")
    sign = -1 if n < 0 else 1
    m = abs(n)
    found: dict[int, int] = {}
    for p in _WHEEL_PRIMES:
        while m % p == 0:
            found[p] = found.get(p, 0) + 1
            m //= p
    # spokes of the mod-210 wheel start 1, 11, 13, ...; gaps[1] steps 11 -> 13
    p, i = 11, 1
    gaps = _WHEEL_GAPS
    while p * p <= m and p < _TRIAL_BOUND:
        while m % p == 0:
            found[p] = found.get(p, 0) + 1
            m //= p
        p += gaps[i]
        i = (i + 1) % len(gaps)
    if m > 1:
        if p * p > m:
            found[m] = found.get(m, 0) + 1
        else:
            _split_large(m, found)
    return FactoredInt(sign, tuple(sorted(found.items())))


def sqf(n: int) -> int:
    """Signed squarefree part: ``sign(n) * prod p**(k mod 2)``."""
    return factor(n).squarefree_part()


def is_squarefree(n: int) -> bool:
    n = _check_nonzero(n)
    return all(e == 1 for _, e in factor(n).factors)


def euler_phi(d: int) -> int:
    if not isinstance(d, (int, np.integer)) or d < 1:
        raise DomainError(f"euler_phi needs a positive integer, got {d!r}")
    result = int(d)
    for p, _ in factor(int(d)).factors:
        result -= result // p
    return result


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n) on all integer pairs."""
    a, n = int(a), int(n)
    if n == 0:
        return 1 if a in (1, -1) else 0
    if not (a & 1) and not (n & 1):
        return 0
    v = (n & -n).bit_length() - 1
    n >>= v
    k = _KRONECKER_TWO[a & 7] if v & 1 else 1
    if n < 0:
        n = -n
        if a < 0:
            k = -k
    a %= n
    while a:
        v = (a & -a).bit_length() - 1
        a >>= v
        if v & 1:
            k *= _KRONECKER_TWO[n & 7]
        if a & n & 2:
            k = -k
        a, n = n % a, a
    return k if n == 1 else 0


def legendre(a: int, p: int) -> int:
    """Legendre symbol for an odd prime ``p``; thin wrapper over ``kronecker``."""
    if p < 3 or not p & 1:
        raise DomainError(f"legendre needs an odd prime, got {p}")
    return kronecker(a, p)


def fundamental_discriminant(s: int) -> int:
    """Discriminant of Q(sqrt(s)) for squarefree ``s``; ``1`` maps to ``1``."""
    s = _check_nonzero(s, "s")
    if not is_squarefree(s):
        raise DomainError(f"{s} is not squarefree")
    return s if s % 4 == 1 else 4 * s


def _base_primes(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


def iter_prime_segments(
    lo: int, hi: int, segment: int = DEFAULT_SEGMENT
) -> Iterator[np.ndarray]:
    """Yield the primes in (lo, hi] as consecutive int64 arrays.

    Peak memory is one segment plus the base primes up to sqrt(hi).
    """
    lo, hi = int(lo), int(hi)
    if lo < 0 or hi < 1 or lo >= hi:
        raise DomainError(f"sieve range ({lo}, {hi}] is empty or reversed")
    if hi > MAX_SIEVE:
        raise CapacityError(f"sieve bound {hi} exceeds {MAX_SIEVE}")
    base = _base_primes(math.isqrt(hi))
    start = lo
    while start < hi:
        stop = min(start + segment, hi)
        chunk = _backend.sieve_segment(base, start, stop)
        if len(chunk):
            yield chunk
        start = stop


def sieve(lo: int, hi: int, segment: int = DEFAULT_SEGMENT) -> PrimeRange:
    """Primes in (lo, hi] via a segmented sieve."""
    parts = list(iter_prime_segments(lo, hi, segment))
    primes = np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)
    return PrimeRange(int(lo), int(hi), primes)
