"""Pure-Python/numpy versions of the hot kernels.

Same signatures and outputs as the compiled ``_kernels`` extension; selected
by ``_backend`` when the extension is missing or disabled.
"""

import numpy as np

_TWO = (0, 1, 0, -1, 0, -1, 0, 1)


def _jacobi(a, n):
    # n odd positive, 0 <= a < n
    k = 1
    while a:
        while not a & 1:
            a >>= 1
            if _TWO[n & 7] < 0:
                k = -k
        if a & n & 2:
            k = -k
        a, n = n % a, a
    return k if n == 1 else 0


def sieve_segment(base_primes, lo, hi):
    """Primes in (lo, hi], given every prime up to isqrt(hi) in ``base_primes``."""
    size = hi - lo
    flags = np.ones(size, dtype=bool)
    # flags[i] stands for lo + 1 + i
    for p in base_primes:
        p = int(p)
        if p * p > hi:
            break
        first = max(p * p, (lo // p + 1) * p)
        if first <= hi:
            flags[first - lo - 1 :: p] = False
    if lo < 2:
        flags[: 2 - lo - 1] = False
    return (np.flatnonzero(flags) + (lo + 1)).astype(np.int64)


def symbol_codes(primes, values, d):
    """Per-prime residue mod ``d`` and sign mask of (a_i/p) over ``values``.

    Bit i of a mask is set when (values[i]/p) = -1; the mask is -1 when some
    values[i] is divisible by p. Every prime must be odd.
    """
    values = [int(v) for v in values]
    count = len(primes)
    residues = np.empty(count, dtype=np.int64)
    masks = np.empty(count, dtype=np.int64)
    for j in range(count):
        p = int(primes[j])
        residues[j] = p % d
        mask = 0
        for i, a in enumerate(values):
            s = _jacobi(a % p, p)
            if s == 0:
                mask = -1
                break
            if s < 0:
                mask |= 1 << i
        masks[j] = mask
    return residues, masks
