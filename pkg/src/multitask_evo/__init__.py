"""Evolutionary multitasking: MFEA, composite benchmarks, similarity and scoring."""

__version__ = "0.1.0"

from .benchmarks import (  # noqa: E402
    BaseFunction,
    CompositeProblem,
    Generated,
    build_benchmark,
    eval_base_function,
    eval_task,
    list_benchmarks,
)
from .evolution import EvolutionConfig, RunTrace, run_mfea, run_soea  # noqa: E402
from .metrics import compute_scores, normalize_results  # noqa: E402
from .similarity import classify_similarity, spearman_similarity  # noqa: E402
from .unified_space import (  # noqa: E402
    TaskSpec,
    decode,
    generate_rotation_matrix,
    load_rotation_matrix,
    transform_input,
)

__all__ = [
    "BaseFunction",
    "CompositeProblem",
    "EvolutionConfig",
    "Generated",
    "RunTrace",
    "TaskSpec",
    "build_benchmark",
    "classify_similarity",
    "compute_scores",
    "decode",
    "eval_base_function",
    "eval_task",
    "generate_rotation_matrix",
    "list_benchmarks",
    "load_rotation_matrix",
    "normalize_results",
    "run_mfea",
    "run_soea",
    "spearman_similarity",
    "transform_input",
]
