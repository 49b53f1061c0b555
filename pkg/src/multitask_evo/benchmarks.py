"""Base test functions and the nine two-task composite problems.

Every base function takes ``z`` with the variables on the last axis, so a
batch of shape ``(n, D)`` evaluates to ``(n,)`` in one call.
"""
from __future__ import annotations

import zlib
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Union

import numpy as np

from .unified_space import (
    TaskSpec,
    generate_rotation_matrix,
    load_rotation_matrix,
    transform_input,
)


class BaseFunction(str, Enum):
    SPHERE = "sphere"
    ROSENBROCK = "rosenbrock"
    ACKLEY = "ackley"
    RASTRIGIN = "rastrigin"
    GRIEWANK = "griewank"
    WEIERSTRASS = "weierstrass"
    SCHWEFEL = "schwefel"


def sphere(z):
    return np.sum(z**2, axis=-1)


def rosenbrock(z):
    a = z[..., :-1]
    b = z[..., 1:]
    return np.sum(100.0 * (a**2 - b) ** 2 + (a - 1.0) ** 2, axis=-1)


def ackley(z):
    return (
        -20.0 * np.exp(-0.2 * np.sqrt(np.mean(z**2, axis=-1)))
        - np.exp(np.mean(np.cos(2.0 * np.pi * z), axis=-1))
        + 20.0
        + np.e
    )


def rastrigin(z):
    return np.sum(z**2 - 10.0 * np.cos(2.0 * np.pi * z) + 10.0, axis=-1)


def griewank(z):
    d = z.shape[-1]
    i = np.arange(1, d + 1)
    return 1.0 + np.sum(z**2, axis=-1) / 4000.0 - np.prod(np.cos(z / np.sqrt(i)), axis=-1)


WEIERSTRASS_A = 0.5
WEIERSTRASS_B = 3.0
WEIERSTRASS_KMAX = 20

_W_AK = WEIERSTRASS_A ** np.arange(WEIERSTRASS_KMAX + 1)
_W_BK = WEIERSTRASS_B ** np.arange(WEIERSTRASS_KMAX + 1)
# Same expression as the per-variable term so that z = 0 cancels exactly.
_W_OFFSET = float(np.sum(_W_AK * np.cos(2.0 * np.pi * _W_BK * (0.0 + 0.5))))


def weierstrass(z):
    d = z.shape[-1]
    inner = np.cos(2.0 * np.pi * _W_BK * (z[..., None] + 0.5))
    return np.sum(inner @ _W_AK, axis=-1) - d * _W_OFFSET


SCHWEFEL_CONSTANT = 418.9829


def schwefel(z):
    d = z.shape[-1]
    return SCHWEFEL_CONSTANT * d - np.sum(z * np.sin(np.sqrt(np.abs(z))), axis=-1)


_FUNCTIONS = {
    BaseFunction.SPHERE: sphere,
    BaseFunction.ROSENBROCK: rosenbrock,
    BaseFunction.ACKLEY: ackley,
    BaseFunction.RASTRIGIN: rastrigin,
    BaseFunction.GRIEWANK: griewank,
    BaseFunction.WEIERSTRASS: weierstrass,
    BaseFunction.SCHWEFEL: schwefel,
}

# Default box and location of the global minimum (z-space) for each function.
DEFAULT_BOUNDS = {
    BaseFunction.SPHERE: (-100.0, 100.0),
    BaseFunction.ROSENBROCK: (-50.0, 50.0),
    BaseFunction.ACKLEY: (-50.0, 50.0),
    BaseFunction.RASTRIGIN: (-50.0, 50.0),
    BaseFunction.GRIEWANK: (-100.0, 100.0),
    BaseFunction.WEIERSTRASS: (-0.5, 0.5),
    BaseFunction.SCHWEFEL: (-500.0, 500.0),
}
OPTIMUM_VALUE = {
    BaseFunction.ROSENBROCK: 1.0,
    BaseFunction.SCHWEFEL: 420.9687,
}


def eval_base_function(function_id, z) -> np.ndarray | float:
    """Evaluate one of the seven base functions at ``z`` (or a batch of rows)."""
    fid = BaseFunction(function_id)
    z = np.asarray(z, dtype=float)
    if z.ndim == 0 or z.shape[-1] == 0:
        raise ValueError("input vector must be non-empty")
    out = _FUNCTIONS[fid](z)
    return float(out) if z.ndim == 1 else out


def eval_task(task: TaskSpec, x) -> np.ndarray | float:
    """Objective of ``task`` at phenotype ``x`` (already decoded to the box)."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 0 or x.shape[-1] != task.dimension:
        raise ValueError(
            f"task expects {task.dimension} variables, got shape {x.shape}"
        )
    z = transform_input(x, task.rotation, task.shift)
    return eval_base_function(task.function_id, z)


class Intersection(str, Enum):
    COMPLETE = "Complete"
    PARTIAL = "Partial"
    NONE = "None"


class SimilarityBand(str, Enum):
    LOW = "Low"
    MEDIUM = "Medium"
    HIGH = "High"


@dataclass(frozen=True, eq=False)
class CompositeProblem:
    """A set of tasks solved together in one unified space.

    The shipped benchmarks are all pairs; ``tasks`` may hold any number of
    tasks so that single-task problems can reuse the same engine.
    """

    name: str
    tasks: tuple
    intersection: Intersection | None = None
    similarity_band: SimilarityBand | None = None
    reference_similarity: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "tasks", tuple(self.tasks))
        if not self.tasks:
            raise ValueError("a problem needs at least one task")

    @property
    def task1(self) -> TaskSpec:
        return self.tasks[0]

    @property
    def task2(self) -> TaskSpec:
        return self.tasks[1]

    @property
    def n_tasks(self) -> int:
        return len(self.tasks)

    @property
    def dimension(self) -> int:
        return max(t.dimension for t in self.tasks)

    def swapped(self) -> "CompositeProblem":
        return CompositeProblem(
            self.name, self.tasks[::-1], self.intersection,
            self.similarity_band, self.reference_similarity,
        )


# (name, intersection, band, reference R_s) in catalog order.
CATALOG = (
    ("CI+HS", Intersection.COMPLETE, SimilarityBand.HIGH, 1.0000),
    ("CI+MS", Intersection.COMPLETE, SimilarityBand.MEDIUM, 0.2261),
    ("CI+LS", Intersection.COMPLETE, SimilarityBand.LOW, 0.0002),
    ("PI+HS", Intersection.PARTIAL, SimilarityBand.HIGH, 0.8670),
    ("PI+MS", Intersection.PARTIAL, SimilarityBand.MEDIUM, 0.2154),
    ("PI+LS", Intersection.PARTIAL, SimilarityBand.LOW, 0.0725),
    ("NI+HS", Intersection.NONE, SimilarityBand.HIGH, 0.9434),
    ("NI+MS", Intersection.NONE, SimilarityBand.MEDIUM, 0.3669),
    ("NI+LS", Intersection.NONE, SimilarityBand.LOW, 0.0016),
)
_CATALOG_BY_NAME = {row[0]: row for row in CATALOG}

# Per task: (function, dimension, bounds, rotated?, shift or None).
_D = 50
_HALF = np.r_[np.zeros(25), np.ones(25)]
_LAYOUT = {
    "CI+HS": (
        (BaseFunction.GRIEWANK, _D, (-100.0, 100.0), True, None),
        (BaseFunction.RASTRIGIN, _D, (-50.0, 50.0), True, None),
    ),
    "CI+MS": (
        (BaseFunction.ACKLEY, _D, (-50.0, 50.0), True, None),
        (BaseFunction.RASTRIGIN, _D, (-50.0, 50.0), True, None),
    ),
    "CI+LS": (
        (BaseFunction.ACKLEY, _D, (-50.0, 50.0), True, np.full(_D, 42.0969)),
        (BaseFunction.SCHWEFEL, _D, (-500.0, 500.0), False, None),
    ),
    "PI+HS": (
        (BaseFunction.RASTRIGIN, _D, (-50.0, 50.0), True, None),
        (BaseFunction.SPHERE, _D, (-100.0, 100.0), False, 20.0 * _HALF),
    ),
    "PI+MS": (
        (BaseFunction.ACKLEY, _D, (-50.0, 50.0), True, _HALF.copy()),
        (BaseFunction.ROSENBROCK, _D, (-50.0, 50.0), False, None),
    ),
    "PI+LS": (
        (BaseFunction.ACKLEY, _D, (-50.0, 50.0), True, None),
        (BaseFunction.WEIERSTRASS, 25, (-0.5, 0.5), True, None),
    ),
    "NI+HS": (
        (BaseFunction.ROSENBROCK, _D, (-50.0, 50.0), False, None),
        (BaseFunction.RASTRIGIN, _D, (-50.0, 50.0), True, None),
    ),
    "NI+MS": (
        (BaseFunction.GRIEWANK, _D, (-100.0, 100.0), True, np.full(_D, 10.0)),
        (BaseFunction.WEIERSTRASS, _D, (-0.5, 0.5), True, None),
    ),
    "NI+LS": (
        (BaseFunction.RASTRIGIN, _D, (-50.0, 50.0), True, None),
        (BaseFunction.SCHWEFEL, _D, (-500.0, 500.0), False, None),
    ),
}


def canonical_name(name: str) -> str:
    """Accept ``CI+HS``, ``CIHS``, ``ci_hs`` etc. and return ``CI+HS``."""
    key = "".join(ch for ch in str(name).upper() if ch.isalpha())
    if len(key) == 4:
        candidate = f"{key[:2]}+{key[2:]}"
        if candidate in _CATALOG_BY_NAME:
            return candidate
    raise ValueError(
        f"unknown benchmark {name!r}; expected one of {', '.join(r[0] for r in CATALOG)}"
    )


def file_stem(name: str) -> str:
    return canonical_name(name).replace("+", "")


@dataclass(frozen=True)
class Generated:
    """Matrix source: seeded random rotations."""

    seed: int = 0


MatrixSource = Union[Generated, str, Path]


def matrix_seed(seed: int, problem: str, task_index: int) -> int:
    """Seed for one matrix; stable across Python runs and independent per matrix."""
    tag = f"{file_stem(problem)}_T{task_index + 1}".encode()
    return (int(seed) * 1_000_003 + zlib.crc32(tag)) % 2**63


def _rotation_for(problem: str, task_index: int, dim: int, source: MatrixSource):
    if isinstance(source, Generated):
        return generate_rotation_matrix(dim, matrix_seed(source.seed, problem, task_index))
    path = Path(source) / f"{file_stem(problem)}_T{task_index + 1}.txt"
    if not path.is_file():
        raise FileNotFoundError(f"missing rotation matrix file {path}")
    return load_rotation_matrix(path, dim)


def _label(fid, dim, rotated, shift) -> str:
    parts = ["rotated"] if rotated else []
    if shift is not None:
        parts.append("shifted")
    return " ".join(parts + [f"{fid.value} {dim}D"])


def build_benchmark(name: str, matrix_source: MatrixSource = Generated(0)) -> CompositeProblem:
    """Construct one of the nine composite problems.

    Args:
        name: benchmark name, e.g. ``"CI+HS"`` or ``"CIHS"``.
        matrix_source: :class:`Generated` for seeded matrices, or a directory
            containing ``<NAME>_T<k>.txt`` files (e.g. ``CIHS_T1.txt``).
    """
    name = canonical_name(name)
    _, intersection, band, ref = _CATALOG_BY_NAME[name]
    tasks = []
    for k, (fid, dim, (lb, ub), rotated, shift) in enumerate(_LAYOUT[name]):
        rotation = _rotation_for(name, k, dim, matrix_source) if rotated else None
        if shift is not None:
            optimum = shift
        else:
            optimum = np.full(dim, OPTIMUM_VALUE.get(fid, 0.0))
        tasks.append(
            TaskSpec(
                function_id=fid.value,
                dimension=dim,
                lower_bound=lb,
                upper_bound=ub,
                rotation=rotation,
                shift=shift,
                optimum=optimum,
                label=_label(fid, dim, rotated, shift),
            )
        )
    return CompositeProblem(name, tuple(tasks), intersection, band, ref)


@dataclass(frozen=True)
class BenchmarkInfo:
    name: str
    intersection: Intersection
    similarity_band: SimilarityBand
    reference_similarity: float
    task_labels: tuple


def list_benchmarks() -> list[BenchmarkInfo]:
    out = []
    for name, inter, band, ref in CATALOG:
        labels = tuple(_label(fid, dim, rot, sh) for fid, dim, _, rot, sh in _LAYOUT[name])
        out.append(BenchmarkInfo(name, inter, band, ref, labels))
    return out


def single_task_problem(task: TaskSpec, name: str = "single") -> CompositeProblem:
    return CompositeProblem(name, (task,))
