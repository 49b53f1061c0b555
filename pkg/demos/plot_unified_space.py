"""
Decoding one genotype for two tasks
===================================

Every individual lives in the unit hypercube. A task with fewer variables
reads only the leading keys and maps them linearly onto its own box.
"""

import numpy as np

from multitask_evo import build_benchmark, decode, eval_task

problem = build_benchmark("NI+MS")
print(problem.name, "unified dimension:", problem.dimension)
for task in problem.tasks:
    print("  ", task.label, "dim", task.dimension, "bounds", task.lower_bound, task.upper_bound)

###############################################################################
# One random key vector, two phenotypes.

rng = np.random.default_rng(0)
y = rng.random(problem.dimension)
for task in problem.tasks:
    x = decode(y[: task.dimension], task)
    print(f"{task.label:>30}: x[:3] = {np.round(x[:3], 3)}  cost = {eval_task(task, x):.4g}")

###############################################################################
# Encoding a task's optimum and decoding it again is lossless up to rounding.

for task in problem.tasks:
    keys = task.encode(task.optimum)
    back = decode(keys, task)
    print(task.label, "round trip error:", np.abs(back - task.optimum).max())
