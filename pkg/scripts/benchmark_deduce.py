#!/usr/bin/env python3
"""Measure deduction throughput on random scenes.

Generates scenes of increasing object counts and reports how long full
topology (and optionally all-category) deduction takes per scene.
"""

import argparse
import math
import random
import time

from spatrel import AdjustmentSettings, FactBase, SpatialObject, deduce


def random_scene(rng: random.Random, count: int) -> FactBase:
    fb = FactBase()
    for i in range(count):
        fb.upsert(SpatialObject(
            id="obj%d" % i,
            x=rng.uniform(-5, 5), y=rng.uniform(0, 2), z=rng.uniform(-5, 5),
            w=rng.uniform(0.1, 3), h=rng.uniform(0.1, 3), d=rng.uniform(0.1, 3),
            angle=rng.uniform(-math.pi, math.pi),
        ))
    return fb


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", type=int, nargs="+", default=[5, 10, 20, 40])
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--all-categories", action="store_true",
                        help="also time every non-visibility category")
    args = parser.parse_args()
    rng = random.Random(args.seed)
    settings = AdjustmentSettings()
    categories = ["topology"]
    if args.all_categories:
        categories = ["topology", "orientation", "comparability",
                      "similarity", "geography"]

    print("%8s %10s %14s %14s" % ("objects", "pairs", "ms/scene", "pairs/s"))
    for size in args.sizes:
        elapsed = 0.0
        for _ in range(args.repeats):
            fb = random_scene(rng, size)
            start = time.perf_counter()
            deduce(fb, categories, settings)
            elapsed += time.perf_counter() - start
        per_scene = elapsed / args.repeats
        pairs = size * (size - 1)
        print("%8d %10d %14.2f %14.0f"
              % (size, pairs, per_scene * 1000, pairs / per_scene))


if __name__ == "__main__":
    main()
