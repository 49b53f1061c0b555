"""Random-key unified search space and task decoding.

Chromosomes live in ``[0, 1]^D`` where ``D`` is the largest task dimension.
A task reads the first ``D_j`` keys and maps them linearly onto its box.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

ORTHOGONALITY_TOL = 1e-9


class MatrixFormatError(ValueError):
    """A rotation-matrix file could not be parsed into the expected shape."""


class OrthogonalityError(ValueError):
    """A matrix failed the orthogonality check."""


@dataclass(frozen=True, eq=False)
class TaskSpec:
    """One box-constrained minimization task.

    ``function_id`` names a base function from :mod:`multitask_evo.benchmarks`.
    The objective is evaluated at ``z = rotation @ (x - shift)``.
    """

    function_id: str
    dimension: int
    lower_bound: float
    upper_bound: float
    rotation: Optional[np.ndarray] = None
    shift: Optional[np.ndarray] = None
    optimum: Optional[np.ndarray] = None
    label: str = ""

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError(f"dimension must be positive, got {self.dimension}")
        if not self.lower_bound < self.upper_bound:
            raise ValueError(
                f"lower_bound {self.lower_bound} must be below upper_bound {self.upper_bound}"
            )
        for name in ("rotation", "shift", "optimum"):
            value = getattr(self, name)
            if value is None:
                continue
            arr = np.array(value, dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        d = self.dimension
        if self.rotation is not None and self.rotation.shape != (d, d):
            raise ValueError(f"rotation must be {d}x{d}, got {self.rotation.shape}")
        if self.shift is not None and self.shift.shape != (d,):
            raise ValueError(f"shift must have length {d}, got {self.shift.shape}")
        if self.optimum is not None:
            if self.optimum.shape != (d,):
                raise ValueError(f"optimum must have length {d}, got {self.optimum.shape}")
            if np.any(self.optimum < self.lower_bound) or np.any(self.optimum > self.upper_bound):
                raise ValueError("optimum lies outside the task bounds")

    @property
    def width(self) -> float:
        return self.upper_bound - self.lower_bound

    def encode(self, x) -> np.ndarray:
        """Inverse of :func:`decode` for the first ``dimension`` keys."""
        return (np.asarray(x, dtype=float) - self.lower_bound) / self.width


def validate_keys(y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.ndim < 1 or y.shape[-1] == 0:
        raise ValueError("random-key vector must be non-empty")
    if np.any(~np.isfinite(y)) or np.any(y < 0.0) or np.any(y > 1.0):
        raise ValueError("random keys must lie in [0, 1]")
    return y


def decode(y, task: TaskSpec) -> np.ndarray:
    """Map random keys onto the task's box.

    Works on a single chromosome of shape ``(D,)`` or a batch ``(n, D)``;
    only the first ``task.dimension`` keys are used.

    >>> t = TaskSpec("sphere", 2, -50.0, 50.0)
    >>> decode([0.5, 0.0, 0.3], t).tolist()
    [0.0, -50.0]
    """
    y = validate_keys(y)
    if task.dimension > y.shape[-1]:
        raise ValueError(
            f"task needs {task.dimension} keys but chromosome has {y.shape[-1]}"
        )
    return _decode_unchecked(y, task)


def _decode_unchecked(y: np.ndarray, task: TaskSpec) -> np.ndarray:
    # Exact at the corners: lb + 1.0 * width may round, so pin y == 1 to ub.
    keys = y[..., : task.dimension]
    x = task.lower_bound + keys * task.width
    return np.where(keys == 1.0, task.upper_bound, x)


def transform_input(x, rotation=None, shift=None) -> np.ndarray:
    """Return ``rotation @ (x - shift)``; absent arguments act as identity.

    ``x`` may be a single vector or a batch of row vectors.
    """
    x = np.asarray(x, dtype=float)
    d = x.shape[-1]
    z = x
    if shift is not None:
        shift = np.asarray(shift, dtype=float)
        if shift.shape != (d,):
            raise ValueError(f"shift length {shift.shape} does not match input dimension {d}")
        z = z - shift
    if rotation is not None:
        rotation = np.asarray(rotation, dtype=float)
        if rotation.shape != (d, d):
            raise ValueError(f"rotation shape {rotation.shape} does not match input dimension {d}")
        z = z @ rotation.T
    return z


def orthogonality_error(m) -> float:
    """Max-norm of ``M^T M - I``."""
    m = np.asarray(m, dtype=float)
    return float(np.max(np.abs(m.T @ m - np.eye(m.shape[0]))))


def generate_rotation_matrix(dimension: int, seed: int) -> np.ndarray:
    """Seeded random orthogonal matrix.

    A standard-normal matrix is QR-factorized and the columns of ``Q`` are
    sign-flipped so that ``R`` has a positive diagonal, which makes the
    factorization unique and the result Haar-distributed.
    """
    if dimension < 1:
        raise ValueError(f"dimension must be >= 1, got {dimension}")
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((dimension, dimension))
    q, r = np.linalg.qr(a)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    q = q * signs
    q.setflags(write=False)
    return q


_FIELD_SPLIT = re.compile(r"[,\s]+")


def parse_rotation_matrix(text: str, dimension: int) -> np.ndarray:
    rows = [line.strip() for line in text.splitlines()]
    rows = [line for line in rows if line]
    if len(rows) != dimension:
        raise MatrixFormatError(f"expected {dimension} rows, found {len(rows)}")
    out = np.empty((dimension, dimension))
    for i, line in enumerate(rows):
        fields = [f for f in _FIELD_SPLIT.split(line) if f]
        if len(fields) != dimension:
            raise MatrixFormatError(
                f"row {i + 1}: expected {dimension} fields, found {len(fields)}"
            )
        try:
            out[i] = [float(f) for f in fields]
        except ValueError as exc:
            raise MatrixFormatError(f"row {i + 1}: {exc}") from None
    return out


def load_rotation_matrix(path, dimension: int) -> np.ndarray:
    """Read a square matrix from a plain-text file and check orthogonality.

    Fields may be separated by commas and/or whitespace; ``\\r\\n`` line
    endings are accepted.
    """
    path = Path(path)
    text = path.read_bytes().decode("utf-8")
    try:
        m = parse_rotation_matrix(text, dimension)
    except MatrixFormatError as exc:
        raise MatrixFormatError(f"{path}: {exc}") from None
    err = orthogonality_error(m)
    if not err < ORTHOGONALITY_TOL:
        raise OrthogonalityError(
            f"{path}: matrix is not orthogonal, max|M^T M - I| = {err:.6g}"
        )
    m.setflags(write=False)
    return m


def save_rotation_matrix(path, m) -> None:
    m = np.asarray(m, dtype=float)
    lines = [" ".join(repr(float(v)) for v in row) for row in m]
    Path(path).write_text("\n".join(lines) + "\n")
