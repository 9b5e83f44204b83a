# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: segmented sieve and per-prime quadratic sign masks."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef long long i64
ctypedef unsigned long long u64


cdef inline int _jacobi(u64 a, u64 n) noexcept nogil:
    # n odd positive, a < n
    cdef int k = 1
    cdef u64 t
    cdef unsigned int r
    while a != 0:
        while (a & 1) == 0:
            a >>= 1
            r = n & 7
            if r == 3 or r == 5:
                k = -k
        if (a & n & 2) != 0:
            k = -k
        t = n % a
        n = a
        a = t
    return k if n == 1 else 0


def sieve_segment(base_primes, i64 lo, i64 hi):
    """Primes in (lo, hi], given every prime up to isqrt(hi) in ``base_primes``."""
    cdef cnp.ndarray[i64, ndim=1] base = np.ascontiguousarray(base_primes, dtype=np.int64)
    cdef i64 size = hi - lo
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] flags = np.ones(size, dtype=np.uint8)
    cdef i64 p, first, m, i, nb = base.shape[0], count = 0
    with nogil:
        for i in range(nb):
            p = base[i]
            if p * p > hi:
                break
            first = (lo // p + 1) * p
            if first < p * p:
                first = p * p
            m = first
            while m <= hi:
                flags[m - lo - 1] = 0
                m += p
        i = 0
        while i < size and lo + 1 + i < 2:
            flags[i] = 0
            i += 1
        for i in range(size):
            count += flags[i]
    cdef cnp.ndarray[i64, ndim=1] out = np.empty(count, dtype=np.int64)
    cdef i64 j = 0
    with nogil:
        for i in range(size):
            if flags[i]:
                out[j] = lo + 1 + i
                j += 1
    return out


def symbol_codes(primes, values, i64 d):
    """Per-prime residue mod ``d`` and sign mask of (a_i/p) over ``values``.

    Bit i of a mask is set when (values[i]/p) = -1; the mask is -1 when some
    values[i] is divisible by p. Every prime must be odd.
    """
    cdef cnp.ndarray[i64, ndim=1] ps = np.ascontiguousarray(primes, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] vs = np.asarray([int(v) for v in values], dtype=np.int64)
    cdef i64 count = ps.shape[0], nv = vs.shape[0]
    cdef cnp.ndarray[i64, ndim=1] residues = np.empty(count, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] masks = np.empty(count, dtype=np.int64)
    cdef i64 j, i, p, a, mask
    cdef int s
    with nogil:
        for j in range(count):
            p = ps[j]
            residues[j] = p % d
            mask = 0
            for i in range(nv):
                a = vs[i] % p
                if a < 0:
                    a += p
                s = _jacobi(<u64>a, <u64>p)
                if s == 0:
                    mask = -1
                    break
                if s < 0:
                    mask |= (<i64>1) << i
            masks[j] = mask
    return residues, masks
