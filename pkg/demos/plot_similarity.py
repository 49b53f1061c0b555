"""
How alike are two tasks?
========================

Sample the unified space uniformly, evaluate both tasks on every sample and
correlate the two rankings. A value near one means the landscapes order
points the same way.
"""

import time

from multitask_evo import build_benchmark, spearman_similarity
from multitask_evo.benchmarks import CATALOG

start = time.perf_counter()
print(f"{'problem':8} {'R_s':>8} {'band':>7} {'reference':>10}")
for name, _, band, reference in CATALOG:
    rep = spearman_similarity(build_benchmark(name), sample_count=50_000, seed=1)
    flag = "" if rep.band is band else "  (band differs)"
    print(f"{name:8} {rep.r_s:8.4f} {rep.band.value:>7} {reference:10.4f}{flag}")
print(f"{time.perf_counter() - start:.1f}s")
