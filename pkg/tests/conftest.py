import math

import pytest

from multiquad import ProblemInstance


def euler(a: int, p: int) -> int:
    """Legendre symbol by Euler's criterion."""
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def primes_upto(n: int) -> list[int]:
    return [p for p in range(2, n + 1) if all(p % q for q in range(2, math.isqrt(p) + 1))]


@pytest.fixture
def inst():
    def make(S, d=1):
        return ProblemInstance(tuple(S), d)

    return make
