"""Time the compiled kernels against the pure-Python fallback.

Run with ``python benchmarks/bench_kernels.py [--repeat N]``.  Each backend
gets an identically seeded generator, so the draws are checked for equality
alongside the timings.
"""

import argparse
import time

import numpy as np

from rnbayes._kernels import BACKENDS, MU_NORMAL, S2_GIG


def _gig(mod, gen):
    return mod.gig_fill(1.5, 0.8, 2.0, 20_000, gen)


def _normal(mod, gen):
    return mod.normal_fill(200_000, gen)


def _gibbs(mod, gen):
    mu, s2, _ = mod.gibbs_chain(0.08, 1.0, MU_NORMAL, 0.05, 0.04, S2_GIG, 3.0, 0.4, 10.0,
                                0.05, 0.04, 5_000, 1_000, 1, gen)
    return np.concatenate([mu, s2])


CASES = [("gig_fill n=20000", _gig), ("normal_fill n=200000", _normal), ("gibbs_chain 6000 iters", _gibbs)]


def bench(repeat):
    rows = []
    for label, fn in CASES:
        times, outputs = {}, {}
        for name, mod in BACKENDS.items():
            best = np.inf
            for _ in range(repeat):
                gen = np.random.default_rng(12345)
                t0 = time.perf_counter()
                outputs[name] = fn(mod, gen)
                best = min(best, time.perf_counter() - t0)
            times[name] = best
        same = all(np.array_equal(outputs["python"], v) for v in outputs.values())
        rows.append((label, times, same))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    names = list(BACKENDS)
    print(f"{'kernel':<26}" + "".join(f"{n + ' [s]':>14}" for n in names) + f"{'speedup':>10}{'same':>7}")
    for label, times, same in bench(args.repeat):
        speed = times["python"] / times["cython"] if "cython" in times else float("nan")
        print(f"{label:<26}" + "".join(f"{times[n]:>14.4f}" for n in names) + f"{speed:>10.1f}{str(same):>7}")


if __name__ == "__main__":
    main()
