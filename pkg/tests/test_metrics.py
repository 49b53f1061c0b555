import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from multitask_evo.metrics import (
    DegenerateDataError,
    compute_scores,
    normalize_results,
    score_trend,
)

shapes = st.tuples(st.integers(2, 4), st.integers(1, 3), st.integers(2, 6))


def result_matrices():
    return shapes.flatmap(
        lambda s: arrays(float, s, elements=st.floats(-1e3, 1e3, allow_nan=False), unique=True)
    )


def test_two_point_normalization():
    out = normalize_results([[[1.0]], [[3.0]]])
    assert out.ravel().tolist() == [-1.0, 1.0]


def test_hand_computed_matrix():
    # Algorithms x tasks x reps = 2 x 1 x 2 with task values {0, 0, 2, 2}: mu = 1, sigma = 1.
    out = normalize_results([[[0.0, 0.0]], [[2.0, 2.0]]])
    assert out.ravel().tolist() == [-1.0, -1.0, 1.0, 1.0]


def test_single_algorithm_centered():
    out = normalize_results([[[1.0, 5.0, 2.0], [7.0, 8.0, 10.0]]])
    np.testing.assert_allclose(out.sum(axis=(0, 2)), 0.0, atol=1e-12)
    assert compute_scores([[[1.0, 5.0, 2.0]]]).scores.tolist() == [0.0]


def test_degenerate_task_named():
    with pytest.raises(DegenerateDataError, match="task 2"):
        normalize_results([[[1.0], [4.0]], [[2.0], [4.0]]])


def test_incomplete_matrix():
    with pytest.raises(ValueError):
        normalize_results([[[1.0, np.nan]], [[2.0, 3.0]]])
    with pytest.raises(ValueError):
        normalize_results([[1.0, 2.0]])


def test_two_algorithms_mirror():
    rep = compute_scores([[[1.0, 2.0], [5.0, 3.0]], [[4.0, 6.0], [9.0, 1.0]]], ["mfea", "soea"])
    assert rep.scores[0] == pytest.approx(-rep.scores[1], abs=1e-12)
    assert rep.score_of("mfea") == rep.scores[0]


def test_dominating_algorithm_negative():
    a = [[[1.0, 2.0], [3.0, 4.0]]]
    b = [[[5.0, 6.0], [7.0, 8.0]]]
    rep = compute_scores(np.concatenate([a, b]))
    assert rep.scores[0] < 0 < rep.scores[1]


def test_means_and_population_stds():
    rep = compute_scores([[[1.0, 3.0]], [[2.0, 6.0]]])
    assert rep.means.tolist() == [[2.0], [4.0]]
    assert rep.stds.tolist() == [[1.0], [2.0]]


def test_label_count():
    with pytest.raises(ValueError):
        compute_scores([[[1.0]], [[2.0]]], ["only-one"])


@settings(max_examples=200)
@given(m=result_matrices())
def test_zero_sum(m):
    assert abs(compute_scores(m).scores.sum()) < 1e-9


@settings(max_examples=200)
@given(m=result_matrices(), a=st.floats(0.01, 100), b=st.floats(-100, 100), seed=st.integers(0, 99))
def test_affine_invariance(m, a, b, seed):
    j = seed % m.shape[1]
    warped = m.copy()
    warped[:, j, :] = a * warped[:, j, :] + b
    np.testing.assert_allclose(compute_scores(warped).scores, compute_scores(m).scores, atol=1e-9)


@settings(max_examples=100)
@given(m=result_matrices(), seed=st.integers(0, 2**32 - 1))
def test_repetition_order_irrelevant(m, seed):
    perm = np.random.default_rng(seed).permutation(m.shape[2])
    np.testing.assert_allclose(compute_scores(m[:, :, perm]).scores, compute_scores(m).scores, atol=1e-9)


@settings(max_examples=200)
@given(m=result_matrices(), delta=st.floats(0.001, 500), seed=st.integers(0, 2**32 - 1))
def test_improving_a_cell_lowers_centered_sum(m, delta, seed):
    r = np.random.default_rng(seed)
    i, j, l = (int(r.integers(s)) for s in m.shape)
    better = m.copy()
    better[i, j, l] -= delta

    def centered(x):
        return (x[i, j] - x[:, j].mean()).sum()

    assert centered(better) < centered(m)


def test_score_is_population_relative():
    # Lowering B's 3 to 2 pulls it toward the pooled mean; sigma shrinks faster than
    # the centered sum, so B's score rises (1.789 -> 1.809).
    before = compute_scores([[[0.0, 1.0]], [[2.0, 3.0]]]).scores[1]
    after = compute_scores([[[0.0, 1.0]], [[2.0, 2.0]]]).scores[1]
    assert before == pytest.approx(2 / np.sqrt(1.25))
    assert after == pytest.approx(1.5 / np.sqrt(2.75 / 4))
    assert after > before


def test_score_trend_alignment():
    evals = np.array([100, 200, 300])
    best_a = np.array([[5.0], [3.0], [1.0]])
    best_b = np.array([[6.0], [4.0], [4.0]])
    # Two reps each so every checkpoint has spread.
    curves = [[(evals, best_a), (evals, best_a + 0.5)], [(np.array([200, 400]), best_b[:2]), (np.array([200, 400]), best_b[:2] + 1)]]
    out = score_trend(np.array([100, 200, 300, 400]), curves)
    assert out.shape == (4, 2)
    np.testing.assert_allclose(out.sum(axis=1), 0.0, atol=1e-12)
    # At 300 algorithm B still reports its 200-eval value (last checkpoint not exceeding 300).
    expected = compute_scores(np.array([[[1.0, 1.5]], [[6.0, 7.0]]])).scores
    np.testing.assert_allclose(out[2], expected)
