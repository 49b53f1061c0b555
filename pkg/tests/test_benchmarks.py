import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multitask_evo.benchmarks import (
    BaseFunction,
    Generated,
    Intersection,
    SimilarityBand,
    build_benchmark,
    canonical_name,
    eval_base_function,
    eval_task,
    list_benchmarks,
)
from multitask_evo.unified_space import decode, orthogonality_error, save_rotation_matrix

NAMES = [info.name for info in list_benchmarks()]


# Scalar-loop implementations written straight from the textbook formulas;
# they share no code with the vectorized versions.
def ref_sphere(x):
    return sum(v * v for v in x)


def ref_rosenbrock(x):
    return sum(100 * (x[i] ** 2 - x[i + 1]) ** 2 + (x[i] - 1) ** 2 for i in range(len(x) - 1))


def ref_ackley(x):
    d = len(x)
    s1 = sum(v * v for v in x) / d
    s2 = sum(math.cos(2 * math.pi * v) for v in x) / d
    return -20 * math.exp(-0.2 * math.sqrt(s1)) - math.exp(s2) + 20 + math.e


def ref_rastrigin(x):
    return sum(v * v - 10 * math.cos(2 * math.pi * v) + 10 for v in x)


def ref_griewank(x):
    prod = 1.0
    for i, v in enumerate(x, start=1):
        prod *= math.cos(v / math.sqrt(i))
    return 1 + sum(v * v for v in x) / 4000 - prod


def ref_weierstrass(x):
    a, b, kmax = 0.5, 3, 20
    total = 0.0
    for v in x:
        total += sum(a**k * math.cos(2 * math.pi * b**k * (v + 0.5)) for k in range(kmax + 1))
    return total - len(x) * sum(a**k * math.cos(2 * math.pi * b**k * 0.5) for k in range(kmax + 1))


def ref_schwefel(x):
    return 418.9829 * len(x) - sum(v * math.sin(math.sqrt(abs(v))) for v in x)


REFERENCE = {
    "sphere": (ref_sphere, 100),
    "rosenbrock": (ref_rosenbrock, 50),
    "ackley": (ref_ackley, 50),
    "rastrigin": (ref_rastrigin, 50),
    "griewank": (ref_griewank, 100),
    "weierstrass": (ref_weierstrass, 0.5),
    "schwefel": (ref_schwefel, 500),
}


class TestBaseFunctions:
    def test_exactly_seven(self):
        assert {f.value for f in BaseFunction} == set(REFERENCE)

    @pytest.mark.parametrize("fid", sorted(REFERENCE))
    def test_matches_reference_loop(self, fid, rng):
        ref, bound = REFERENCE[fid]
        for d in (1, 2, 7, 25, 50):
            for _ in range(5):
                z = rng.uniform(-bound, bound, size=d)
                expected = ref(list(z))
                assert eval_base_function(fid, z) == pytest.approx(expected, rel=1e-10, abs=1e-9)

    def test_batch_matches_single(self, rng):
        z = rng.uniform(-5, 5, size=(8, 6))
        for fid in REFERENCE:
            batch = eval_base_function(fid, z)
            singles = [eval_base_function(fid, row) for row in z]
            np.testing.assert_allclose(batch, singles, rtol=1e-13, atol=1e-12)

    def test_sphere_example(self):
        assert eval_base_function("sphere", [3.0, 4.0]) == 25.0

    def test_rosenbrock_at_ones(self):
        assert eval_base_function("rosenbrock", np.ones(50)) == 0.0

    def test_ackley_at_zero(self):
        assert abs(eval_base_function("ackley", np.zeros(50))) < 1e-12

    def test_rastrigin_and_griewank_at_zero(self):
        assert eval_base_function("rastrigin", np.zeros(50)) == 0.0
        assert eval_base_function("griewank", np.zeros(50)) == 0.0

    def test_weierstrass_at_zero(self):
        assert abs(eval_base_function("weierstrass", np.zeros(25))) < 1e-9

    def test_schwefel_at_stated_optimum(self):
        assert abs(eval_base_function("schwefel", np.full(50, 420.9687))) < 1e-3

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            eval_base_function("sphere", [])

    def test_unknown_function(self):
        with pytest.raises(ValueError):
            eval_base_function("himmelblau", [1.0])

    def test_does_not_mutate_input(self, rng):
        z = rng.normal(size=10)
        before = z.copy()
        for fid in REFERENCE:
            eval_base_function(fid, z)
        assert np.array_equal(z, before)

    @settings(max_examples=50)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_separable_permutation_invariance(self, seed):
        r = np.random.default_rng(seed)
        z = r.uniform(-50, 50, size=30)
        p = r.permutation(30)
        for fid in ("sphere", "rastrigin"):
            assert abs(eval_base_function(fid, z) - eval_base_function(fid, z[p])) < 1e-9

    @pytest.mark.parametrize("name", NAMES)
    def test_non_negative_by_sampling(self, name, rng):
        problem = build_benchmark(name, Generated(3))
        y = rng.random((2000, problem.dimension))
        for t in problem.tasks:
            assert np.min(eval_task(t, decode(y, t))) > -1e-6

    def test_deterministic(self, rng):
        z = rng.normal(size=50)
        for fid in REFERENCE:
            assert eval_base_function(fid, z) == eval_base_function(fid, z.copy())


class TestCatalog:
    def test_order_and_count(self):
        assert NAMES[0] == "CI+HS" and NAMES[-1] == "NI+LS" and len(NAMES) == 9

    def test_three_by_three_partition(self):
        cells = {(n[:2], n[3:]) for n in NAMES}
        assert cells == {(i, s) for i in ("CI", "PI", "NI") for s in ("HS", "MS", "LS")}

    def test_metadata_agrees_with_name(self):
        inter = {"CI": Intersection.COMPLETE, "PI": Intersection.PARTIAL, "NI": Intersection.NONE}
        band = {"HS": SimilarityBand.HIGH, "MS": SimilarityBand.MEDIUM, "LS": SimilarityBand.LOW}
        for info in list_benchmarks():
            assert info.intersection is inter[info.name[:2]]
            assert info.similarity_band is band[info.name[3:]]

    @pytest.mark.parametrize("name", NAMES)
    def test_round_trip(self, name):
        assert build_benchmark(name).name == name

    @pytest.mark.parametrize("alias", ["CIHS", "ci+hs", "ci_hs", "CI-HS"])
    def test_aliases(self, alias):
        assert canonical_name(alias) == "CI+HS"

    def test_unknown(self):
        with pytest.raises(ValueError):
            build_benchmark("XX+YY")


class TestProblems:
    def test_ci_hs(self):
        p = build_benchmark("CI+HS", Generated(7))
        assert p.dimension == 50
        assert p.intersection is Intersection.COMPLETE
        assert p.reference_similarity == 1.0

    def test_pi_ls_dimensions(self):
        p = build_benchmark("PI+LS", Generated(7))
        assert p.task2.dimension == 25 and p.dimension == 50

    def test_ni_ms_weierstrass_is_50d(self):
        assert build_benchmark("NI+MS").task2.dimension == 50

    def test_ci_ls_optima_coincide_in_unified_space(self):
        p = build_benchmark("CI+LS", Generated(7))
        k1 = p.task1.encode(p.task1.optimum)
        k2 = p.task2.encode(p.task2.optimum)
        np.testing.assert_allclose(k1, 0.920969, atol=1e-12)
        np.testing.assert_allclose(k2, 0.9209687, atol=1e-12)
        assert np.max(np.abs(k1 - k2)) < 1e-6

    def test_table_of_layouts(self):
        expected = {
            "CI+HS": [("griewank", 50, -100, True, False), ("rastrigin", 50, -50, True, False)],
            "CI+MS": [("ackley", 50, -50, True, False), ("rastrigin", 50, -50, True, False)],
            "CI+LS": [("ackley", 50, -50, True, True), ("schwefel", 50, -500, False, False)],
            "PI+HS": [("rastrigin", 50, -50, True, False), ("sphere", 50, -100, False, True)],
            "PI+MS": [("ackley", 50, -50, True, True), ("rosenbrock", 50, -50, False, False)],
            "PI+LS": [("ackley", 50, -50, True, False), ("weierstrass", 25, -0.5, True, False)],
            "NI+HS": [("rosenbrock", 50, -50, False, False), ("rastrigin", 50, -50, True, False)],
            "NI+MS": [("griewank", 50, -100, True, True), ("weierstrass", 50, -0.5, True, False)],
            "NI+LS": [("rastrigin", 50, -50, True, False), ("schwefel", 50, -500, False, False)],
        }
        for name, rows in expected.items():
            p = build_benchmark(name)
            for t, (fid, d, lb, rotated, shifted) in zip(p.tasks, rows):
                assert (t.function_id, t.dimension, t.lower_bound) == (fid, d, lb)
                assert t.upper_bound == -lb
                assert (t.rotation is not None, t.shift is not None) == (rotated, shifted)

    def test_shift_vectors(self):
        half = np.r_[np.zeros(25), np.ones(25)]
        np.testing.assert_array_equal(build_benchmark("PI+HS").task2.shift, 20 * half)
        np.testing.assert_array_equal(build_benchmark("PI+MS").task1.shift, half)
        np.testing.assert_array_equal(build_benchmark("NI+MS").task1.shift, np.full(50, 10.0))
        np.testing.assert_array_equal(build_benchmark("CI+LS").task1.shift, np.full(50, 42.0969))

    def test_every_matrix_distinct_and_orthogonal(self):
        mats = [t.rotation for n in NAMES for t in build_benchmark(n).tasks if t.rotation is not None]
        for m in mats:
            assert orthogonality_error(m) < 1e-9
        for i in range(len(mats)):
            for j in range(i + 1, len(mats)):
                if mats[i].shape == mats[j].shape:
                    assert not np.array_equal(mats[i], mats[j])

    def test_matrix_seed_changes_matrices(self):
        a = build_benchmark("CI+HS", Generated(0)).task1.rotation
        b = build_benchmark("CI+HS", Generated(1)).task1.rotation
        assert not np.array_equal(a, b)

    def test_eval_task_examples(self):
        assert eval_task(build_benchmark("CI+HS").task2, np.zeros(50)) == 0.0
        pihs = build_benchmark("PI+HS").task2
        assert eval_task(pihs, pihs.shift) == 0.0
        assert eval_task(build_benchmark("NI+HS").task1, np.ones(50)) == 0.0

    def test_eval_task_dimension_mismatch(self):
        with pytest.raises(ValueError):
            eval_task(build_benchmark("PI+LS").task2, np.zeros(50))

    @pytest.mark.parametrize("name", NAMES)
    def test_optima(self, name):
        p = build_benchmark(name, Generated(11))
        for t in p.tasks:
            tol = 1e-3 if t.function_id == "schwefel" else 1e-6
            assert eval_task(t, t.optimum) < tol


class TestMatrixDirectory:
    def test_loads_from_directory(self, tmp_path):
        generated = build_benchmark("PI+LS", Generated(5))
        save_rotation_matrix(tmp_path / "PILS_T1.txt", generated.task1.rotation)
        save_rotation_matrix(tmp_path / "PILS_T2.txt", generated.task2.rotation)
        loaded = build_benchmark("PI+LS", tmp_path)
        assert np.array_equal(loaded.task1.rotation, generated.task1.rotation)
        assert np.array_equal(loaded.task2.rotation, generated.task2.rotation)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError, match="CIHS_T1.txt"):
            build_benchmark("CI+HS", tmp_path)

    def test_unrotated_tasks_need_no_file(self, tmp_path):
        save_rotation_matrix(tmp_path / "NIHS_T2.txt", np.eye(50))
        p = build_benchmark("NI+HS", tmp_path)
        assert p.task1.rotation is None
