"""Experiment orchestration: seeded MFEA/SOEA repetitions, scores and result files.

Output layout (all CSVs have a header row, floats use 17 significant digits):

* ``scores.csv``            problem, algorithm, task, mean, std, score
* ``trace_<P>_<algo>_<r>.csv``  generation, evaluations, best_task1, best_task2
* ``score_trend_<P>.csv``   evaluations, then one score column per algorithm
* ``similarity.csv``        problem, r_s, band, samples, seed
* ``manifest.json``         configuration echo, per-run seeds, version, timestamps
"""
from __future__ import annotations

import csv
import io
import json
import logging
import re
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .benchmarks import CATALOG, Generated, build_benchmark, canonical_name, file_stem
from .evolution import EvolutionConfig, RunTrace, run_mfea, run_soea
from .metrics import ScoreReport, compute_scores, score_trend
from .similarity import SimilarityReport, spearman_similarity

log = logging.getLogger(__name__)

ALGORITHMS = ("mfea", "soea")
ALL_PROBLEMS = tuple(row[0] for row in CATALOG)


def fmt(value) -> str:
    return format(float(value), ".17g")


def run_seed(base_seed: int, problem: str, algorithm: str, rep: int) -> int:
    """Seed for repetition ``rep`` (1-based) of ``algorithm`` on ``problem``.

    ``base_seed + crc32("<PROBLEM>|<algorithm>|<rep>")`` with the problem in
    its file-stem form (e.g. ``CIHS``). Adding problems or algorithms does not
    change the seeds of existing runs.
    """
    key = f"{file_stem(problem)}|{algorithm}|{rep}".encode()
    return int(base_seed) + zlib.crc32(key)


@dataclass(frozen=True)
class ExperimentConfig:
    problems: tuple = ALL_PROBLEMS
    algorithms: tuple = ALGORITHMS
    repetitions: int = 20
    evolution: EvolutionConfig = field(default_factory=EvolutionConfig)
    matrix_seed: int = 0
    matrix_dir: Optional[str] = None
    output_dir: str = "results"
    base_seed: int = 0
    similarity_samples: int = 0
    jobs: int = 1

    def __post_init__(self):
        object.__setattr__(self, "problems", tuple(canonical_name(p) for p in self.problems))
        algos = tuple(a.lower() for a in self.algorithms)
        unknown = [a for a in algos if a not in ALGORITHMS]
        if unknown or not algos:
            raise ValueError(f"unknown algorithms {unknown}; choose from {ALGORITHMS}")
        object.__setattr__(self, "algorithms", algos)
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if not self.problems:
            raise ValueError("no problems selected")

    @property
    def matrix_source(self):
        return Path(self.matrix_dir) if self.matrix_dir else Generated(self.matrix_seed)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["problems"] = list(self.problems)
        d["algorithms"] = list(self.algorithms)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        d["evolution"] = EvolutionConfig(**d.get("evolution", {}))
        d["problems"] = tuple(d.get("problems", ALL_PROBLEMS))
        d["algorithms"] = tuple(d.get("algorithms", ALGORITHMS))
        return cls(**d)


@dataclass
class ResultBundle:
    config: ExperimentConfig
    traces: dict  # (problem, algorithm, rep) -> RunTrace
    scores: dict  # problem -> ScoreReport
    similarity: list
    manifest: dict
    score_trends: dict = field(default_factory=dict)  # problem -> (checkpoints, scores)


def _run_one(args):
    problem_name, algorithm, rep, config = args
    problem = build_benchmark(problem_name, config.matrix_source)
    evo = config.evolution
    if algorithm == "mfea":
        seed = run_seed(config.base_seed, problem_name, "mfea", rep)
        return run_mfea(problem, replace(evo, seed=seed))
    # Equal per-task effort: the budget is split evenly over independent runs.
    per_task_budget = evo.eval_budget // problem.n_tasks
    subs = []
    for j, task in enumerate(problem.tasks):
        seed = run_seed(config.base_seed, problem_name, f"soea/T{j + 1}", rep)
        subs.append(run_soea(task, replace(evo, seed=seed, eval_budget=per_task_budget)))
    return merge_single_task_traces(subs, seed=run_seed(config.base_seed, problem_name, "soea", rep))


def merge_single_task_traces(traces: list[RunTrace], seed: int) -> RunTrace:
    """Combine per-task SOEA runs generation by generation.

    Evaluations are summed across the sub-runs; a run that stopped earlier
    carries its last state forward.
    """
    g = max(len(t.generations) for t in traces)
    evaluations = np.zeros(g, dtype=np.int64)
    columns = []
    for t in traces:
        idx = np.minimum(np.arange(g), len(t.generations) - 1)
        evaluations += t.evaluations[idx]
        columns.append(t.best[idx])
    labels = tuple(lbl for t in traces for lbl in t.task_labels)
    return RunTrace("soea", seed, np.arange(g, dtype=np.int64), evaluations,
                    np.concatenate(columns, axis=1), labels)


def _jobs(config: ExperimentConfig):
    for p in config.problems:
        for a in config.algorithms:
            for r in range(1, config.repetitions + 1):
                yield (p, a, r, config)


def run_experiment(config: ExperimentConfig, write: bool = True) -> ResultBundle:
    """Run every (problem, algorithm, repetition), score, and optionally write files."""
    started = datetime.now(timezone.utc).isoformat()
    jobs = list(_jobs(config))
    # Build every problem once up front so missing matrix files fail fast.
    for p in config.problems:
        build_benchmark(p, config.matrix_source)
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(job) for job in jobs]
    traces = {(p, a, r): tr for (p, a, r, _), tr in zip(jobs, results)}

    scores, trends = {}, {}
    for p in config.problems:
        scores[p] = compute_scores(results_matrix(traces, p, config), config.algorithms)
        if len(config.algorithms) > 1:
            trends[p] = _trend_for(traces, p, config)

    similarity = []
    if config.similarity_samples >= 2:
        for p in config.problems:
            problem = build_benchmark(p, config.matrix_source)
            similarity.append(spearman_similarity(problem, config.similarity_samples, config.base_seed))

    manifest = {
        "tool": "multitask_evo",
        "version": __version__,
        "started": started,
        "finished": datetime.now(timezone.utc).isoformat(),
        "config": config.to_dict(),
        "runs": [
            {"problem": p, "algorithm": a, "rep": r, "seed": int(traces[(p, a, r)].seed)}
            for (p, a, r, _) in jobs
        ],
    }
    bundle = ResultBundle(config, traces, scores, similarity, manifest, trends)
    if write:
        emit_results(bundle, config.output_dir)
    return bundle


def results_matrix(traces: dict, problem: str, config: ExperimentConfig) -> np.ndarray:
    """``I[i, j, l]``: final best of algorithm i on task j in repetition l."""
    return np.array(
        [
            np.stack([traces[(problem, a, r)].final_best for r in range(1, config.repetitions + 1)], axis=-1)
            for a in config.algorithms
        ]
    )


def _trend_for(traces, problem, config):
    curves = [
        [(traces[(problem, a, r)].evaluations, traces[(problem, a, r)].best)
         for r in range(1, config.repetitions + 1)]
        for a in config.algorithms
    ]
    checkpoints = np.unique(np.concatenate([c[0] for runs in curves for c in runs]))
    return checkpoints, score_trend(checkpoints, curves)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def trace_csv(trace: RunTrace) -> str:
    k = trace.best.shape[1]
    header = ["generation", "evaluations"] + [f"best_task{j + 1}" for j in range(k)]
    rows = (
        [int(g), int(e)] + [fmt(v) for v in b]
        for g, e, b in zip(trace.generations, trace.evaluations, trace.best)
    )
    return _csv_text(header, rows)


def scores_csv(scores: dict) -> str:
    rows = []
    for problem, rep in scores.items():
        for i, algo in enumerate(rep.algorithms):
            for j in range(rep.means.shape[1]):
                rows.append([problem, algo, j + 1, fmt(rep.means[i, j]), fmt(rep.stds[i, j]),
                             fmt(rep.scores[i])])
    return _csv_text(["problem", "algorithm", "task", "mean", "std", "score"], rows)


def similarity_csv(reports: list[SimilarityReport]) -> str:
    rows = [[r.problem_name, fmt(r.r_s), r.band.value, r.sample_count, r.seed] for r in reports]
    return _csv_text(["problem", "r_s", "band", "samples", "seed"], rows)


def trace_filename(problem: str, algorithm: str, rep: int) -> str:
    return f"trace_{file_stem(problem)}_{algorithm}_{rep}.csv"


def _write(path: Path, text: str) -> None:
    try:
        path.write_text(text, newline="")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def emit_results(bundle: ResultBundle, output_dir) -> list[Path]:
    out = Path(output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc.strerror or exc}") from exc
    files = {}
    for (p, a, r), trace in sorted(bundle.traces.items()):
        files[trace_filename(p, a, r)] = trace_csv(trace)
    files["scores.csv"] = scores_csv(bundle.scores)
    files["similarity.csv"] = similarity_csv(bundle.similarity)
    for p, (checkpoints, trend) in bundle.score_trends.items():
        header = ["evaluations"] + [f"score_{a}" for a in bundle.config.algorithms]
        rows = ([int(c)] + [fmt(v) for v in row] for c, row in zip(checkpoints, trend))
        files[f"score_trend_{file_stem(p)}.csv"] = _csv_text(header, rows)
    files["manifest.json"] = json.dumps(bundle.manifest, indent=2, sort_keys=True) + "\n"
    written = []
    for name, text in files.items():
        _write(out / name, text)
        written.append(out / name)
    log.info("wrote %d files to %s", len(written), out)
    return written


_TRACE_NAME = re.compile(r"^trace_([A-Z]{4})_([a-z]+)_(\d+)\.csv$")


def read_trace(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    body = rows[1:]
    gens = np.array([int(r[0]) for r in body], dtype=np.int64)
    evals = np.array([int(r[1]) for r in body], dtype=np.int64)
    best = np.array([[float(v) for v in r[2:]] for r in body])
    return gens, evals, best


def scores_from_traces(input_dir) -> dict:
    """Recompute per-problem ScoreReports from ``trace_*.csv`` files.

    Algorithm order follows ``manifest.json`` when present, otherwise
    :data:`ALGORITHMS` order.
    """
    input_dir = Path(input_dir)
    order = list(ALGORITHMS)
    problems_order = None
    manifest = input_dir / "manifest.json"
    if manifest.is_file():
        cfg = json.loads(manifest.read_text())["config"]
        order = cfg["algorithms"]
        problems_order = [file_stem(p) for p in cfg["problems"]]
    finals: dict = {}
    for path in input_dir.glob("trace_*.csv"):
        m = _TRACE_NAME.match(path.name)
        if not m:
            continue
        stem, algo, rep = m.group(1), m.group(2), int(m.group(3))
        _, _, best = read_trace(path)
        finals.setdefault(stem, {}).setdefault(algo, {})[rep] = best[-1]
    if not finals:
        raise FileNotFoundError(f"no trace files found in {input_dir}")
    stems = problems_order or sorted(finals)
    reports = {}
    for stem in stems:
        by_algo = finals.get(stem, {})
        algos = [a for a in order if a in by_algo]
        reps = sorted(by_algo[algos[0]])
        for a in algos:
            if sorted(by_algo[a]) != reps:
                raise ValueError(f"{stem}: algorithm {a} has a different set of repetitions")
        matrix = np.array([np.stack([by_algo[a][r] for r in reps], axis=-1) for a in algos])
        reports[canonical_name(stem)] = compute_scores(matrix, algos)
    return reports


def load_manifest_config(path) -> ExperimentConfig:
    data = json.loads(Path(path).read_text())
    return ExperimentConfig.from_dict(data["config"])
