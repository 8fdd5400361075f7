#!/usr/bin/env python3
"""Benchmark the numba lane against the pure-numpy lane.

Runs the hot kernels on workloads shaped like real supervision batches:
single distances, one query against many labels, and the all-pairs matrix.
The two lanes produce identical integers; this only measures time.

    python3 benchmarks/bench_kernels.py            # active lane (numba if available)
    KOMPET_NUMBA=0 python3 benchmarks/bench_kernels.py   # numpy lane

or compare both in one go with --both (spawns a subprocess for the numpy lane).
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def make_words(rng, n, lo, hi, alphabet="abcdefghijklmnopqrstuvwxyzæøå "):
    words = []
    for _ in range(n):
        ln = int(rng.integers(lo, hi + 1))
        words.append("".join(alphabet[i] for i in rng.integers(0, len(alphabet), ln)))
    return words


def bench() -> dict:
    from kompet import _kernels
    from kompet.matcher import levenshtein, levenshtein_matrix

    rng = np.random.default_rng(12345)
    results = {"backend": _kernels.BACKEND}

    # Warm-up triggers JIT compilation so it is not billed to the loops.
    levenshtein("warmup", "wramup")
    levenshtein_matrix(["ab", "cd"], ["ef"])

    queries = make_words(rng, 2000, 3, 25)
    labels = make_words(rng, 2000, 3, 30)
    t0 = time.perf_counter()
    total = 0
    for q, l in zip(queries, labels):
        total += levenshtein(q, l)
    results["pairs_2000"] = time.perf_counter() - t0
    results["pairs_checksum"] = total

    # One query against many candidate labels, the fetch-skill hot shape.
    candidates = make_words(rng, 5000, 3, 30)
    t0 = time.perf_counter()
    mat = levenshtein_matrix(queries[:20], candidates)
    results["matrix_20x5000"] = time.perf_counter() - t0
    results["matrix_checksum"] = int(mat.sum())

    universe = make_words(rng, 700, 0, 7, alphabet="abc")
    t0 = time.perf_counter()
    mat = levenshtein_matrix(universe, universe)
    results["matrix_700x700"] = time.perf_counter() - t0
    results["universe_checksum"] = int(mat.sum())
    return results


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--both", action="store_true", help="also run the numpy lane and compare")
    parser.add_argument("--json", action="store_true")
    args = parser.parse_args()

    mine = bench()
    rows = [mine]
    if args.both and mine["backend"] == "numba":
        env = dict(os.environ, KOMPET_NUMBA="0")
        out = subprocess.run(
            [sys.executable, __file__, "--json"], env=env, capture_output=True, text=True, check=True
        )
        rows.append(json.loads(out.stdout))

    if args.json:
        print(json.dumps(mine))
        return

    for other in rows:
        print(f"\nbackend: {other['backend']}")
        for key in ("pairs_2000", "matrix_20x5000", "matrix_700x700"):
            print(f"  {key:16s} {other[key] * 1000:10.1f} ms")
    if len(rows) == 2:
        checks = ("pairs_checksum", "matrix_checksum", "universe_checksum")
        same = all(rows[0][c] == rows[1][c] for c in checks)
        print(f"\nchecksums identical across lanes: {same}")
        for key in ("pairs_2000", "matrix_20x5000", "matrix_700x700"):
            speedup = rows[1][key] / rows[0][key]
            print(f"  {key:16s} numba speedup {speedup:5.1f}x")


if __name__ == "__main__":
    main()
