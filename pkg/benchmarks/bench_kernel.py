#!/usr/bin/env python3
"""Benchmark the compiled execution kernel against the pure-Python one.

The kernel runs program bytecode to a final state; it is the hot loop of
pass-rate scoring, which dominates enumerative repair and search. Run:

    python benchmarks/bench_kernel.py [--programs 60] [--worlds 8] [--repeats 3]
"""

from __future__ import annotations

import argparse
import random
import time
from array import array

from karelfix import kernels
from karelfix.bytecode import compile_prog
from karelfix.interp import _encode_grids
from karelfix.sampler import SampleLimits, sample_program
from karelfix.syntax import flatten
from karelfix.vocab import token_ids
from karelfix.world import DIR_TO_INT, sample_world


def build_workload(n_programs: int, n_worlds: int, seed: int):
    rng = random.Random(seed)
    cases = []
    for _ in range(n_programs):
        prog = sample_program(SampleLimits(max_total_tokens=40, rng_seed=rng.getrandbits(32)))
        code = compile_prog(prog)
        worlds = []
        for _ in range(n_worlds):
            w = sample_world(rng.getrandbits(32))
            obstacles, markers = _encode_grids(w)
            worlds.append(
                (w.h, w.w, w.robot_r, w.robot_c, DIR_TO_INT[w.robot_dir], obstacles, markers)
            )
        cases.append((code, worlds, flatten(prog)))
    return cases


def bench_run(impl, cases, step_limit=1000) -> tuple[float, int]:
    checksum = 0
    start = time.perf_counter()
    for code, worlds, _tokens in cases:
        counters = array("i", [0] * code.n_slots)
        snaps = array("i", [0] * code.n_slots)
        for h, w, r, c, d, obstacles, markers0 in worlds:
            markers = bytearray(markers0)
            status, _, fr, fc, fd, actions = impl.run(
                code.code, h, w, r, c, d, obstacles, markers, step_limit, counters, snaps
            )
            checksum += status + fr + fc + fd + actions
    return time.perf_counter() - start, checksum


def bench_levenshtein(impl, cases) -> tuple[float, int]:
    seqs = [array("i", token_ids(tokens)) for _, _, tokens in cases]
    total = 0
    start = time.perf_counter()
    for a in seqs:
        for b in seqs:
            total += impl.levenshtein(a, b)
    return time.perf_counter() - start, total


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--programs", type=int, default=60)
    ap.add_argument("--worlds", type=int, default=8)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    impls = kernels.implementations()
    if "compiled" not in impls:
        print("note: compiled kernel unavailable, benchmarking pure only")
    cases = build_workload(args.programs, args.worlds, args.seed)
    n_execs = args.programs * args.worlds

    print(f"workload: {args.programs} programs x {args.worlds} worlds, best of {args.repeats}")
    results = {}
    for name, impl in impls.items():
        best = None
        checksum = None
        for _ in range(args.repeats):
            elapsed, cs = bench_run(impl, cases)
            checksum = cs if checksum is None else checksum
            assert cs == checksum, "kernels disagree with themselves"
            best = elapsed if best is None else min(best, elapsed)
        results[name] = (best, checksum)
        print(f"  execute/{name:9s} {best * 1e6 / n_execs:9.2f} us/exec  ({n_execs / best:,.0f} exec/s)")
    checksums = {cs for _, cs in results.values()}
    assert len(checksums) == 1, f"implementations disagree: {results}"

    lev = {}
    for name, impl in impls.items():
        best = None
        total = None
        for _ in range(args.repeats):
            elapsed, t = bench_levenshtein(impl, cases)
            total = t if total is None else total
            assert t == total
            best = elapsed if best is None else min(best, elapsed)
        lev[name] = (best, total)
        pairs = args.programs**2
        print(f"  distance/{name:8s} {best * 1e6 / pairs:9.2f} us/pair  ({pairs / best:,.0f} pair/s)")
    assert len({t for _, t in lev.values()}) == 1

    if "compiled" in impls and "pure" in impls:
        print(f"speedup (execute):  {results['pure'][0] / results['compiled'][0]:6.1f}x")
        print(f"speedup (distance): {lev['pure'][0] / lev['compiled'][0]:6.1f}x")


if __name__ == "__main__":
    main()
