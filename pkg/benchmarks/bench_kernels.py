"""Time the compiled and pure-Python peeling and matching kernels.

    python3 benchmarks/bench_kernels.py --sizes 10000 30000 100000 --c 1.95
"""

import argparse
import time

import numpy as np

from hyperorient import kernels
from hyperorient.hypergraph import gen_uniform
from hyperorient.rng import Seed


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - start)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[10_000, 30_000, 100_000])
    ap.add_argument("--c", type=float, default=1.95, help="edge density (default 1.95, just below c*)")
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--l", type=int, default=2)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    backends = kernels.available_backends()
    if "compiled" not in backends:
        print("compiled extension not built; timing the Python kernels only")
    print(f"k={args.k} ell={args.l} c={args.c} best of {args.repeat}")
    print(f"{'n':>8} {'kernel':>6} " + " ".join(f"{b:>10}" for b in backends) + f" {'speedup':>8}")
    for n in args.sizes:
        h = gen_uniform(n, int(args.c * n), args.k, Seed(n, 0))
        _, e_alive, _ = kernels.peel(h.edges, n, args.l)
        core_edges = h.edges[e_alive.astype(bool)]
        rows = {
            "peel": lambda b: kernels.peel(h.edges, n, args.l, backend=b),
            "match": lambda b: kernels.match(core_edges, n, args.l, backend=b),
        }
        for name, fn in rows.items():
            times, outs = {}, {}
            for b in backends:
                times[b], outs[b] = best_of(lambda: fn(b), args.repeat)
            if len(outs) == 2:
                a, c = outs["python"], outs["compiled"]
                assert all(np.array_equal(x, y) for x, y in zip(a[:2], c[:2]) if x is not None), "backends disagree"
            speed = times["python"] / times["compiled"] if "compiled" in times else float("nan")
            print(f"{n:>8} {name:>6} " + " ".join(f"{times[b]:>9.4f}s" for b in backends) + f" {speed:>7.1f}x")


if __name__ == "__main__":
    main()
