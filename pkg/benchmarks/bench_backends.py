"""Compare the compiled kernels against the pure-Python reference.

Runs each hot kernel on identical inputs under both backends and prints a
throughput table.  The two implementations are bit-compatible (see
tests/test_kernels.py), so this is purely a speed measurement.

    python3 benchmarks/bench_backends.py [--repeat 3]
"""

import argparse
import time

import numpy as np

from percolimit._kernels import _pykern

try:
    from percolimit._kernels import _ckern
except ImportError:
    _ckern = None

ENV_T = np.array([0.0, 0.3, 1.0])
ENV_V = np.array([4.0, 2.0, 0.5])
NO_Y = np.empty(0, dtype=np.int64)
SEGS = (np.array([0], dtype=np.int64), np.array([0.45]))


def gen(seed=0):
    return np.random.Generator(np.random.PCG64(seed))


def bench_gw(impl):
    rng = gen(1)
    n = 0
    for _ in range(2000):
        out, _ = impl.gw_walk(rng, 2, 0.45, 1_000_000)
        n += out.size
    return n, "vertices"


def bench_sin(impl):
    rng = gen(2)
    n = 0
    for _ in range(50):
        impl.sin_walk(rng, 2, 40_000, SEGS[0], SEGS[1], _pykern.MODE_COND,
                      NO_Y, 10_000_000)
        n += 40_000
    return n, "dfs steps"


def bench_invade(impl):
    rng = gen(3)
    n_steps = 20_000
    impl.invade_walk(rng, 2, n_steps)
    return n_steps, "invasions"


def bench_sde(impl):
    rng = gen(4)
    n = 0
    for _ in range(20):
        impl.sde_path(rng, 100_000, 1e-4, 1e-2, ENV_T, ENV_V, np.inf, 0)
        n += 100_000
    return n, "euler steps"


def bench_block(impl):
    n_rep, steps, blocks = 50, 2000, 5
    gens = [gen(100 + r) for r in range(n_rep)]
    y = np.zeros(n_rep)
    ymin = np.zeros(n_rep)
    occ = np.zeros(n_rep)
    ptr = np.zeros(n_rep, dtype=np.int64)
    status = np.zeros(n_rep, dtype=np.int64)
    for _ in range(blocks):
        impl.sde_block_many(gens, y, ymin, occ, ptr, status, steps, 1e-4,
                            1e-2, [ENV_T] * n_rep, [ENV_V] * n_rep,
                            np.full(n_rep, np.inf), 2.0, -3.0, 0.0, 1.0,
                            True, 1e9)
    return n_rep * steps * blocks, "euler steps"


BENCHES = [
    ("gw_walk", bench_gw),
    ("sin_walk", bench_sin),
    ("invade_walk", bench_invade),
    ("sde_path", bench_sde),
    ("sde_block_many", bench_block),
]


def run(fn, impl, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        n, unit = fn(impl)
        best = min(best, time.perf_counter() - t0)
    return n / best, unit


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--repeat", type=int, default=3,
                    help="timing repetitions, best is kept")
    args = ap.parse_args()

    if _ckern is None:
        print("compiled backend not built; showing pure-Python rates only")
    header = f"{'kernel':<16}{'python':>14}{'compiled':>14}{'speedup':>9}  unit"
    print(header)
    print("-" * len(header))
    for name, fn in BENCHES:
        py_rate, unit = run(fn, _pykern, args.repeat)
        if _ckern is not None:
            c_rate, _ = run(fn, _ckern, args.repeat)
            print(f"{name:<16}{py_rate:>12.3g}/s{c_rate:>12.3g}/s"
                  f"{c_rate / py_rate:>8.1f}x  {unit}")
        else:
            print(f"{name:<16}{py_rate:>12.3g}/s{'-':>14}{'-':>9}  {unit}")


if __name__ == "__main__":
    main()
