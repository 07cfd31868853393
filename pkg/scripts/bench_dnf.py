#!/usr/bin/env python3
"""Probe-cost scaling of the dynamic DNF algorithms.

Sweeps formula size m, drives the naive rescan and the counter-based
algorithm over the same flip stream, and prints per-step probe counts and
wall time. The counter algorithm's cost tracks occurrence-list length
(about 3m/n here), independent of how many clauses a rescan would touch.
"""

import argparse
import random
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from dyncx.dnf import Clause, ClauseCounters, DnfInstance, NaiveAlgorithm


def build_instance(rng, n, m, w):
    assignment = [rng.randint(0, 1) for _ in range(n)]
    # every clause starts falsified so the rescan pays full price up front
    clauses = []
    for _ in range(m):
        vs = rng.sample(range(n), w)
        clauses.append(Clause(tuple((v, not assignment[v]) for v in vs)))
    return DnfInstance(n, clauses, assignment, w)


def run_one(factory, inst, stream):
    algo = factory(inst)
    algo.answer()
    base = algo.meter.count
    t0 = time.perf_counter()
    for tok in stream:
        algo.apply(tok)
    wall = time.perf_counter() - t0
    return (algo.meter.count - base) / len(stream), wall


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+",
                    default=[64, 256, 1024, 4096, 16384])
    ap.add_argument("--steps", type=int, default=400)
    ap.add_argument("--width", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = random.Random(args.seed)
    print(f"{'m':>7} {'n':>6} {'naive/step':>11} {'counters/step':>14} "
          f"{'naive s':>8} {'counters s':>11}")
    for m in args.sizes:
        n = max(8, m // 2)
        inst = build_instance(rng, n, m, min(args.width, n))
        stream = [("f", rng.randrange(n), rng.randint(0, 1))
                  for _ in range(args.steps)]
        naive_cost, naive_wall = run_one(NaiveAlgorithm, inst, stream)
        fast_cost, fast_wall = run_one(ClauseCounters, inst, stream)
        print(f"{m:>7} {n:>6} {naive_cost:>11.1f} {fast_cost:>14.1f} "
              f"{naive_wall:>8.3f} {fast_wall:>11.3f}")


if __name__ == "__main__":
    main()
