"""Inter-task similarity via Spearman's rank correlation over unified-space samples."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .benchmarks import CompositeProblem, SimilarityBand, eval_task
from .unified_space import _decode_unchecked

DEFAULT_SAMPLES = 1_000_000
DESK_SAMPLES = 100_000
CHUNK_SIZE = 20_000

LOW_THRESHOLD = 0.2
HIGH_THRESHOLD = 0.8


@dataclass(frozen=True)
class SimilarityReport:
    problem_name: str
    r_s: float
    sample_count: int
    seed: int
    band: SimilarityBand


def rank_with_ties(values, rng: np.random.Generator) -> np.ndarray:
    """Ascending ranks ``1..n``; exact ties get a random order among themselves.

    >>> rank_with_ties([0.3, 0.1, 0.2], np.random.default_rng(0)).tolist()
    [3, 1, 2]
    """
    values = np.asarray(values, dtype=float).ravel()
    if values.size == 0:
        raise ValueError("cannot rank an empty sequence")
    tiebreak = rng.random(values.size)
    order = np.lexsort((tiebreak, values))
    ranks = np.empty(values.size, dtype=np.int64)
    ranks[order] = np.arange(1, values.size + 1)
    return ranks


def pearson(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    da = a - a.mean()
    db = b - b.mean()
    denom = np.sqrt(np.dot(da, da) * np.dot(db, db))
    if not denom > 0:
        raise ArithmeticError("zero variance in correlation input")
    return float(np.dot(da, db) / denom)


def rank_correlation(costs1, costs2, rng: np.random.Generator) -> float:
    """Spearman's R_s: Pearson correlation of the two factorial-rank lists."""
    costs1 = np.asarray(costs1, dtype=float)
    costs2 = np.asarray(costs2, dtype=float)
    if costs1.shape != costs2.shape:
        raise ValueError("cost lists must have equal length")
    if costs1.size < 2:
        raise ValueError("need at least two samples")
    r1 = rank_with_ties(costs1, rng)
    r2 = rank_with_ties(costs2, rng)
    return pearson(r1, r2)


def sample_costs(problem: CompositeProblem, sample_count: int, seed: int):
    """Uniform unified-space samples decoded and evaluated on the first two tasks.

    Samples are drawn in fixed-size chunks, each from its own generator keyed
    by ``(seed, chunk index)``, so the result does not depend on how chunks
    are scheduled.
    """
    t1, t2 = problem.tasks[:2]
    d = problem.dimension
    c1 = np.empty(sample_count)
    c2 = np.empty(sample_count)
    for chunk, start in enumerate(range(0, sample_count, CHUNK_SIZE)):
        stop = min(start + CHUNK_SIZE, sample_count)
        rng = np.random.default_rng([seed, chunk])
        y = rng.random((stop - start, d))
        c1[start:stop] = eval_task(t1, _decode_unchecked(y, t1))
        c2[start:stop] = eval_task(t2, _decode_unchecked(y, t2))
    return c1, c2


def classify_similarity(r_s: float) -> SimilarityBand:
    if not -1.0 <= r_s <= 1.0:
        raise ValueError(f"R_s must lie in [-1, 1], got {r_s}")
    if r_s < LOW_THRESHOLD:
        return SimilarityBand.LOW
    if r_s < HIGH_THRESHOLD:
        return SimilarityBand.MEDIUM
    return SimilarityBand.HIGH


def spearman_similarity(
    problem: CompositeProblem, sample_count: int = DEFAULT_SAMPLES, seed: int = 0
) -> SimilarityReport:
    if sample_count < 2:
        raise ValueError("sample_count must be at least 2")
    if problem.n_tasks < 2:
        raise ValueError("similarity needs a problem with two tasks")
    c1, c2 = sample_costs(problem, sample_count, seed)
    if not (np.all(np.isfinite(c1)) and np.all(np.isfinite(c2))):
        raise ArithmeticError(f"{problem.name}: non-finite objective values in sample")
    tie_rng = np.random.default_rng([seed, 2**32 - 1])
    # Float rounding can push |r| a hair past 1 for identical rankings.
    r_s = float(np.clip(rank_correlation(c1, c2, tie_rng), -1.0, 1.0))
    return SimilarityReport(problem.name, r_s, sample_count, seed, classify_similarity(r_s))
