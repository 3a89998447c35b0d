"""Compare the numba and numpy kernel backends on the hot paths.

Usage: python3 bench/bench_kernels.py [--repeat N]

Each kernel runs once per backend for warmup (numba compiles on the first
call), then `repeat` timed runs; the table reports the best time.
"""

import argparse
import time

import numpy as np

from factcong import kernels
from factcong.field import PrimeContext, find_primitive_root


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    p = 1_000_003
    ctx = PrimeContext.create(p)
    small = PrimeContext.create(10007, with_dlog=True)
    window = kernels.factorial_window(small.p, 0, small.p - 1)
    rng = np.random.default_rng(1)
    q = 2013265921
    size = 1 << 18
    root = pow(find_primitive_root(q), (q - 1) // size, q)
    ntt_data = rng.integers(0, q, size=size).astype(np.int64)
    signs3 = np.ones(3, dtype=np.int64)

    cases = [
        ("factorial_window n=1e6", lambda: kernels.factorial_window(p, 0, p - 1)),
        ("dlog_table p=1e6", lambda: kernels.dlog_table(p, ctx.g)),
        (
            "ntt 2^18",
            lambda: kernels.ntt_inplace(ntt_data.copy(), q, root),
        ),
        (
            "pair_product_tally p=10007",
            lambda: kernels.pair_product_tally(window, window, small.p),
        ),
        (
            "sum_tally k=3 n=200",
            lambda: kernels.sum_tally(window[:200], 3, signs3, small.p),
        ),
    ]

    previous = kernels.active_backend()
    rows = []
    try:
        for name, fn in cases:
            row = {"kernel": name}
            for backend in kernels.IMPLEMENTATIONS:
                kernels.use_backend(backend)
                row[backend] = best_of(fn, args.repeat)
            rows.append(row)
    finally:
        kernels.use_backend(previous)

    backends = list(kernels.IMPLEMENTATIONS)
    has_both = "numpy" in backends and "numba" in backends
    width = max(len(r["kernel"]) for r in rows)
    header = "kernel".ljust(width) + "".join(f"  {b:>12}" for b in backends)
    if has_both:
        header += f"  {'numba gain':>10}"
    print(header)
    print("-" * len(header))
    for row in rows:
        line = row["kernel"].ljust(width)
        for b in backends:
            line += f"  {row[b] * 1e3:>10.2f}ms"
        if has_both:
            line += f"  {row['numpy'] / row['numba']:>9.1f}x"
        print(line)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
