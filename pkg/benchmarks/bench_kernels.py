"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--hi 2000000] [--repeat 3]
"""

import argparse
import math
import timeit

import numpy as np

from multiquad import _kernels_py, arith

try:
    from multiquad import _kernels as compiled
except ImportError:
    compiled = None


def bench(label, fn, repeat):
    best = min(timeit.repeat(fn, number=1, repeat=repeat))
    print(f"{label:<34} {best * 1e3:10.1f} ms")
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--hi", type=int, default=2_000_000, help="sieve and symbol range (0, hi]")
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    base = arith._base_primes(math.isqrt(args.hi) + 1)
    primes = arith.sieve(2, args.hi).primes
    primes = primes[primes != 2]
    values = (2, 3, -1, 5, 7, 30)
    print(f"range (0, {args.hi}], {len(primes)} odd primes, |S| = {len(values)}")

    backends = [("python", _kernels_py)]
    if compiled is not None:
        backends.insert(0, ("cython", compiled))
    else:
        print("compiled extension not built; timing the fallback only")

    times = {}
    for name, mod in backends:
        times[name, "sieve"] = bench(f"{name}: sieve_segment", lambda: mod.sieve_segment(base, 0, args.hi), args.repeat)
        times[name, "symbols"] = bench(f"{name}: symbol_codes", lambda: mod.symbol_codes(primes, values, 840), args.repeat)

    if compiled is not None:
        a = compiled.symbol_codes(primes, values, 840)
        b = _kernels_py.symbol_codes(primes, values, 840)
        assert all(np.array_equal(x, y) for x, y in zip(a, b)), "backends disagree"
        for kernel in ("sieve", "symbols"):
            print(f"speedup {kernel:<8} {times['python', kernel] / times['cython', kernel]:6.1f}x")


if __name__ == "__main__":
    main()
