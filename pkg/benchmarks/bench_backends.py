"""Compiled versus pure-Python kernels on the same workloads.

    python3 benchmarks/bench_backends.py [--repeat 3] [--quick]

Each workload runs on every available backend; the table reports the best
wall time over the repeats and the speed-up of each backend relative to
the pure-Python one.  Results are also checked for agreement so a fast
but wrong kernel cannot look good.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from powpath import PenaltyPoint, solve, synth_instance
from powpath._backend import AVAILABLE
from powpath.pathwise import build_omega_grid, path_fixed_q


def _best(fn, repeat):
    times, out = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def workloads(quick: bool):
    n_b = 2_000 if quick else 20_000
    b = np.random.default_rng(0).uniform(-6, 6, n_b)
    ds = synth_instance(0, n=60 if quick else 100, p=20 if quick else 50)
    prob = ds.problem

    def curve(name):
        return np.concatenate([AVAILABLE[name].threshold_array(1.0, q, b) for q in (0.3, 0.7, 1.0, 1.5)])

    def one_solve(name):
        return solve(prob, PenaltyPoint(0.05 * prob.col_y_products.std(), 0.6), backend=name).beta

    def path(name):
        grid = build_omega_grid(prob, 0.8, k=10 if quick else 20)
        return path_fixed_q(prob, 0.8, grid, backend=name).columns

    return [(f"threshold x {4 * n_b}", curve), ("single solve q=0.6", one_solve),
            ("warm path q=0.8", path)]


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="small sizes, for smoke testing")
    args = ap.parse_args(argv)

    names = sorted(AVAILABLE, key=lambda k: k != "python")
    print(f"{'workload':<24}" + "".join(f"{n + ' [s]':>14}" for n in names) + f"{'speed-up':>12}"
          + f"{'max diff':>12}")
    for label, fn in workloads(args.quick):
        times, outs = {}, {}
        for name in names:
            times[name], outs[name] = _best(lambda: fn(name), args.repeat)
        ref = outs["python"]
        diff = max(float(np.abs(outs[n] - ref).max()) for n in names)
        fast = min(times, key=times.get)
        speed = times["python"] / times[fast]
        print(f"{label:<24}" + "".join(f"{times[n]:>14.4f}" for n in names) + f"{speed:>11.1f}x"
              + f"{diff:>12.1e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
