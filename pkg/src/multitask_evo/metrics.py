"""Normalized cross-algorithm performance score.

Results are held in an array ``I[i, j, l]``: algorithm ``i``, task ``j``,
repetition ``l``. Each task is z-scored over all algorithms and
repetitions, and an algorithm's score is the sum of its z-scores. Lower is
better.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


class DegenerateDataError(ValueError):
    """A task's pooled results have zero spread, so they cannot be normalized."""


@dataclass(frozen=True)
class ScoreReport:
    algorithms: tuple
    scores: np.ndarray  # (N,)
    means: np.ndarray  # (N, K) over repetitions
    stds: np.ndarray  # (N, K) population std over repetitions

    def score_of(self, algorithm: str) -> float:
        return float(self.scores[self.algorithms.index(algorithm)])


def as_result_matrix(results) -> np.ndarray:
    m = np.asarray(results, dtype=float)
    if m.ndim != 3 or 0 in m.shape:
        raise ValueError(f"result matrix must be (N, K, L) with all sizes >= 1, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("result matrix has missing or non-finite cells")
    return m


def normalize_results(results) -> np.ndarray:
    """Z-score each task over the pooled ``N * L`` values (population std)."""
    m = as_result_matrix(results)
    mu = m.mean(axis=(0, 2), keepdims=True)
    sigma = m.std(axis=(0, 2), keepdims=True)
    flat = sigma.ravel()
    if np.any(flat <= 0):
        bad = int(np.flatnonzero(flat <= 0)[0])
        raise DegenerateDataError(f"task {bad + 1} has zero standard deviation")
    return (m - mu) / sigma


def compute_scores(results, algorithms: Sequence[str] | None = None) -> ScoreReport:
    """Score every algorithm; with one algorithm the score is 0 by construction.

    >>> compute_scores([[[1.0]], [[3.0]]]).scores.tolist()
    [-1.0, 1.0]
    """
    m = as_result_matrix(results)
    if algorithms is None:
        algorithms = tuple(f"A{i + 1}" for i in range(m.shape[0]))
    algorithms = tuple(algorithms)
    if len(algorithms) != m.shape[0]:
        raise ValueError("one algorithm label per row required")
    if m.shape[0] == 1:
        scores = np.zeros(1)
    else:
        scores = normalize_results(m).sum(axis=(1, 2))
    return ScoreReport(algorithms, scores, m.mean(axis=2), m.std(axis=2))


def score_trend(
    checkpoints: np.ndarray,
    curves: Sequence[Sequence[tuple[np.ndarray, np.ndarray]]],
) -> np.ndarray:
    """Scores at aligned evaluation checkpoints.

    ``curves[i][l]`` is ``(evaluations, best)`` for algorithm ``i`` and
    repetition ``l``, with ``best`` of shape ``(G, K)``. At each checkpoint
    every run contributes the best-so-far value at the last generation whose
    evaluation count does not exceed the checkpoint. Checkpoints where a task
    has zero spread yield ``nan``.
    """
    checkpoints = np.asarray(checkpoints)
    n_alg = len(curves)
    out = np.full((checkpoints.size, n_alg), np.nan)
    sampled = []
    for runs in curves:
        per_rep = []
        for evals, best in runs:
            idx = np.searchsorted(evals, checkpoints, side="right") - 1
            idx = np.clip(idx, 0, len(evals) - 1)
            per_rep.append(np.asarray(best)[idx])  # (C, K)
        sampled.append(np.stack(per_rep, axis=-1))  # (C, K, L)
    stacked = np.stack(sampled, axis=1)  # (C, N, K, L)
    for c in range(checkpoints.size):
        try:
            out[c] = compute_scores(stacked[c]).scores
        except DegenerateDataError:
            pass
    return out
