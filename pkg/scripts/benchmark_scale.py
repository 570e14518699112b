"""Build-and-rank throughput experiment.

Generates synthetic archives of increasing size, measures build (validate +
trait derivation + scoring prep) and one exhaustive rank, and prints a table
with the scaling factor relative to the first row.

    python scripts/benchmark_scale.py --sizes 1000,2500,5000,10000 --seed 3
"""

from __future__ import annotations

import argparse
import os
import sys
import time

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from fresco import archive as arc
from fresco.synth import synthesize


def measure(n: int, seed: int, workers: int | None) -> tuple[float, float]:
    records = synthesize(n, seed=seed).records
    t0 = time.perf_counter()
    archive = arc.build(records)
    t_build = time.perf_counter() - t0
    t0 = time.perf_counter()
    archive.rank(archive.ids()[0], k=8, workers=workers)
    t_rank = time.perf_counter() - t0
    return t_build, t_rank


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="1000,2500,5000,10000")
    parser.add_argument("--seed", type=int, default=3)
    parser.add_argument("--workers", type=int, default=None,
                        help="rank worker processes (default: auto)")
    args = parser.parse_args()

    sizes = [int(s) for s in args.sizes.split(",")]
    print(f"{'n':>8} {'build (s)':>10} {'rank (s)':>10} {'total (s)':>10} {'vs first':>9}")
    base = None
    for n in sizes:
        t_build, t_rank = measure(n, args.seed, args.workers)
        total = t_build + t_rank
        if base is None:
            base = (n, total)
        factor = (total / base[1]) / (n / base[0])
        print(f"{n:>8} {t_build:>10.2f} {t_rank:>10.2f} {total:>10.2f} {factor:>8.2f}x")


if __name__ == "__main__":
    main()
