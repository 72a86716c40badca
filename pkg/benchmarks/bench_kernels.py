#!/usr/bin/env python3
"""Benchmark: compiled geometry kernels vs the pure-numpy fallback.

Covers the two hot paths: batch point-to-line distances (ray hover feedback,
Monte-Carlo noise sweeps) and corridor clearance scans (plan validation).
Run: python benchmarks/bench_kernels.py [--repeats N]
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from deixis.geometry.backend import load_backend


def bench_distances(kern, r1, r2, pts, number):
    return timeit.timeit(lambda: kern.point_line_distances(r1, r2, pts), number=number)


def bench_corridor(kern, segs, centers, half_extents, tops, number):
    def run():
        for x0, y0, x1, y1 in segs:
            kern.corridor_highest_obstacle(
                x0, y0, x1, y1, 0.075, centers, half_extents, tops, -1
            )
    return timeit.timeit(run, number=number)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=200)
    args = parser.parse_args()

    backends = {}
    backends["python"] = load_backend("python")
    try:
        backends["compiled"] = load_backend("compiled")
    except ImportError:
        print("compiled kernels not built; benchmarking the fallback only")

    rng = np.random.default_rng(1)
    r1, r2 = (0.0, 1.05, 0.45), (0.05, 0.85, 0.35)

    print(f"{'case':<34} " + "".join(f"{name:>12} " for name in backends) + "speedup")
    for n_pts in (8, 64, 1024, 16384):
        pts = rng.uniform(-0.7, 0.7, size=(n_pts, 3))
        times = {
            name: bench_distances(kern, r1, r2, pts, args.repeats) / args.repeats
            for name, kern in backends.items()
        }
        row = f"point_line_distances n={n_pts:<8}"
        cells = "".join(f"{times[name] * 1e6:>10.1f}us " for name in backends)
        speed = (
            f"{times['python'] / times['compiled']:.1f}x"
            if len(times) == 2 else "-"
        )
        print(f"{row:<34} {cells}{speed}")

    for n_obj in (4, 16, 64):
        centers = rng.uniform(-0.65, 0.65, size=(n_obj, 2))
        half_extents = rng.uniform(0.02, 0.1, size=n_obj)
        tops = rng.uniform(0.02, 0.4, size=n_obj)
        segs = rng.uniform(-0.7, 0.7, size=(50, 4))
        times = {
            name: bench_corridor(kern, segs, centers, half_extents, tops, args.repeats)
            / (args.repeats * len(segs))
            for name, kern in backends.items()
        }
        row = f"corridor_scan objects={n_obj:<8}"
        cells = "".join(f"{times[name] * 1e6:>10.1f}us " for name in backends)
        speed = (
            f"{times['python'] / times['compiled']:.1f}x"
            if len(times) == 2 else "-"
        )
        print(f"{row:<34} {cells}{speed}")


if __name__ == "__main__":
    main()
