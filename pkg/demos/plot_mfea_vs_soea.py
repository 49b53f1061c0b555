"""
One population for two tasks versus one population each
========================================================

Both solvers get the same evaluation budget. The single-task solver splits
it evenly between its two runs.
"""

import numpy as np

from multitask_evo import EvolutionConfig, build_benchmark, compute_scores, run_mfea, run_soea
from multitask_evo.evolution import with_budget

problem = build_benchmark("CI+MS")
config = EvolutionConfig(population_size=100, eval_budget=20_000)

###############################################################################
# Five seeded repetitions of each.

mfea, soea = [], []
for rep in range(5):
    cfg = with_budget(config, config.eval_budget, seed=rep)
    mfea.append(run_mfea(problem, cfg).final_best)
    half = with_budget(config, config.eval_budget // 2, seed=rep)
    soea.append([run_soea(t, half).final_best[0] for t in problem.tasks])

###############################################################################
# Stack into (algorithm, task, repetition) and score. Lower is better and the
# scores always sum to zero.

results = np.stack([np.array(mfea).T, np.array(soea).T])
report = compute_scores(results, ("mfea", "soea"))
for i, algo in enumerate(report.algorithms):
    means = ", ".join(f"{m:.3g}" for m in report.means[i])
    print(f"{algo}: score {report.scores[i]:+.3f}  mean best per task [{means}]")
