"""Compare the compiled and pure-Python kernels on IC spread and coverage counting.

    python benchmarks/bench_kernels.py [--n 200] [--m 1500] [--sims 500] [--reps 5]
"""

import argparse
import time

import numpy as np

from bpodc import _fallback, kernels
from bpodc.core import RngStream
from bpodc.problems import build_mc_sets, random_digraph


def best_of(fn, reps):
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--m", type=int, default=1500)
    ap.add_argument("--p", type=float, default=0.05)
    ap.add_argument("--sims", type=int, default=500)
    ap.add_argument("--reps", type=int, default=5)
    args = ap.parse_args()

    g = random_digraph(args.n, args.m, RngStream(1))
    seeds = np.arange(0, args.n, 10, dtype=np.int64)
    inst = build_mc_sets(g)
    bits = (np.random.default_rng(0).random(args.n) < 0.3).astype(np.uint8)

    backends = [("python", _fallback)]
    if kernels.compiled is not None:
        backends.insert(0, ("cython", kernels.compiled))
    else:
        print("compiled extension not built; timing the fallback only")

    results = {}
    for name, mod in backends:
        t_ic, total = best_of(lambda: mod.ic_spread(g.indptr, g.indices, seeds, args.p,
                                                    args.sims, 12345), args.reps)
        t_cov, cov = best_of(lambda: mod.coverage_count(inst.indptr, inst.indices, bits, args.n),
                             args.reps * 20)
        results[name] = (t_ic, t_cov, total, cov)
        print(f"{name:>7}  ic_spread {t_ic * 1e3:9.3f} ms  (total {total})   "
              f"coverage {t_cov * 1e6:8.2f} us  (count {cov})")
    if len(results) == 2:
        c, p = results["cython"], results["python"]
        assert c[2:] == p[2:], "backends disagree"
        print(f"speed-up  ic_spread x{p[0] / c[0]:.1f}   coverage x{p[1] / c[1]:.1f}")


if __name__ == "__main__":
    main()
