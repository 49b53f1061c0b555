"""Command-line entry point: ``multitask-evo {list,run,similarity,score}``.

Exit status: 0 success, 1 runtime failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

from .benchmarks import Generated, build_benchmark, canonical_name, list_benchmarks
from .evolution import EvolutionConfig
from .harness import (
    ALGORITHMS,
    ALL_PROBLEMS,
    ExperimentConfig,
    load_manifest_config,
    run_experiment,
    scores_from_traces,
    similarity_csv,
)
from .similarity import DESK_SAMPLES, spearman_similarity

OUT_ENV = "MULTITASK_EVO_OUT"


def _csv_list(text: str) -> list[str]:
    return [t for t in (s.strip() for s in text.split(",")) if t]


def _problems(parser, text):
    try:
        return tuple(canonical_name(p) for p in _csv_list(text))
    except ValueError as exc:
        parser.error(str(exc))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="multitask-evo",
        description="Evolutionary multitasking benchmarks: MFEA vs single-task EA.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    lst = sub.add_parser("list", help="list the nine composite benchmark problems")

    run = sub.add_parser("run", help="run seeded MFEA/SOEA repetitions and write results")
    run.add_argument("--problems", default=",".join(ALL_PROBLEMS),
                     help="comma-separated names, e.g. CIHS,PIMS (default: all nine)")
    run.add_argument("--algos", default=",".join(ALGORITHMS), help="subset of mfea,soea")
    run.add_argument("--reps", type=int, default=20)
    run.add_argument("--budget", type=int, default=100_000,
                     help="evaluations per problem per algorithm")
    run.add_argument("--pop", type=int, default=100)
    run.add_argument("--rmp", type=float, default=0.3)
    run.add_argument("--sbx-eta", type=float, default=2.0)
    run.add_argument("--mut-eta", type=float, default=5.0)
    run.add_argument("--seed", type=int, default=0, help="base seed for run seeds")
    run.add_argument("--matrix-seed", type=int, default=0)
    run.add_argument("--matrix-dir", default=None,
                     help="directory with <NAME>_T<k>.txt rotation matrices")
    run.add_argument("--similarity-samples", type=int, default=0,
                     help="also compute R_s with this many samples (0 = skip)")
    run.add_argument("--jobs", type=int, default=1)
    run.add_argument("--manifest", default=None,
                     help="re-run the configuration recorded in a manifest.json")
    run.add_argument("--out", default=None, help=f"output directory (default: ${OUT_ENV} or ./results)")

    sim = sub.add_parser("similarity", help="Spearman rank similarity of each problem's tasks")
    sim.add_argument("--problems", default=",".join(ALL_PROBLEMS))
    sim.add_argument("--samples", type=int, default=DESK_SAMPLES)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--matrix-seed", type=int, default=0)
    sim.add_argument("--matrix-dir", default=None)
    sim.add_argument("--out", default=None, help="also write similarity.csv here")

    score = sub.add_parser("score", help="recompute scores from persisted trace files")
    score.add_argument("--input", required=True, help="directory containing trace_*.csv")
    for p in (lst, run, sim, score):
        p.set_defaults(subparser=p)
    return parser


def _out_dir(arg):
    return arg or os.environ.get(OUT_ENV) or "results"


def _cmd_list(args, parser) -> int:
    for info in list_benchmarks():
        print(
            f"{info.name}\t{info.intersection.value}\t{info.similarity_band.value}\t"
            f"{info.reference_similarity:.4f}\t{' + '.join(info.task_labels)}"
        )
    return 0


def _cmd_run(args, parser) -> int:
    if args.manifest:
        config = load_manifest_config(args.manifest)
        config = replace(config, output_dir=_out_dir(args.out or config.output_dir))
    else:
        try:
            config = ExperimentConfig(
                problems=_problems(parser, args.problems),
                algorithms=tuple(_csv_list(args.algos)),
                repetitions=args.reps,
                evolution=EvolutionConfig(
                    population_size=args.pop,
                    rmp=args.rmp,
                    sbx_eta=args.sbx_eta,
                    mutation_eta=args.mut_eta,
                    eval_budget=args.budget,
                ),
                matrix_seed=args.matrix_seed,
                matrix_dir=args.matrix_dir,
                output_dir=_out_dir(args.out),
                base_seed=args.seed,
                similarity_samples=args.similarity_samples,
                jobs=args.jobs,
            )
            config.evolution.validate(2)
        except ValueError as exc:
            parser.error(str(exc))
    bundle = run_experiment(config)
    for problem, report in bundle.scores.items():
        cells = "  ".join(
            f"{a}: score={report.scores[i]:+.4f} mean=" + "/".join(f"{m:.4g}" for m in report.means[i])
            for i, a in enumerate(report.algorithms)
        )
        print(f"{problem}  {cells}")
    print(f"results written to {config.output_dir}")
    return 0


def _cmd_similarity(args, parser) -> int:
    problems = _problems(parser, args.problems)
    if args.samples < 2:
        parser.error("--samples must be at least 2")
    source = Path(args.matrix_dir) if args.matrix_dir else Generated(args.matrix_seed)
    reports = [spearman_similarity(build_benchmark(p, source), args.samples, args.seed) for p in problems]
    text = similarity_csv(reports)
    sys.stdout.write(text)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "similarity.csv").write_text(text, newline="")
    return 0


def _cmd_score(args, parser) -> int:
    reports = scores_from_traces(args.input)
    print("problem,algorithm,score")
    for problem, rep in reports.items():
        for i, a in enumerate(rep.algorithms):
            print(f"{problem},{a},{rep.scores[i]:.17g}")
    return 0


_COMMANDS = {
    "list": _cmd_list,
    "run": _cmd_run,
    "similarity": _cmd_similarity,
    "score": _cmd_score,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _COMMANDS[args.command](args, args.subparser)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (OSError, ValueError, ArithmeticError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
