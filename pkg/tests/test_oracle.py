import numpy as np
import pytest

from rspca import (
    GuardError,
    InputError,
    brute_force_opt,
    exact_support_objective,
    local_search_exact_neighborhood,
)

from conftest import random_psd


class TestBruteForce:
    def test_diagonal(self):
        val, sup = brute_force_opt(np.diag([4.0, 3.0, 2.0, 1.0]), k=2, r=2)
        assert val == pytest.approx(7.0)
        assert sup == (0, 1)

    def test_identity_ties_break_lexicographically(self):
        val, sup = brute_force_opt(np.eye(6), k=3, r=2)
        assert val == pytest.approx(2.0)
        assert sup == (0, 1, 2)

    def test_coupled_pair_beats_big_diagonal(self):
        # 2x2 block has top eigenvalue 3 > 2.5 on the singleton
        a = np.array([[2.0, 1.0, 0.0], [1.0, 2.0, 0.0], [0.0, 0.0, 2.5]])
        val, sup = brute_force_opt(a, k=2, r=1)
        assert val == pytest.approx(3.0)
        assert sup == (0, 1)

    def test_dominates_random_subsets(self):
        mat = random_psd(9, 5)
        opt, _ = brute_force_opt(mat, k=4, r=2)
        rng = np.random.RandomState(0)
        for _ in range(100):
            s = sorted(rng.choice(9, size=4, replace=False).tolist())
            val, _ = exact_support_objective(mat, s, r=2)
            assert val <= opt + 1e-9

    def test_permutation_invariance(self):
        mat = random_psd(7, 8)
        a = mat.entries
        perm = np.random.RandomState(3).permutation(7)
        b = a[np.ix_(perm, perm)]
        va, _ = brute_force_opt(a, k=3, r=2)
        vb, _ = brute_force_opt(b, k=3, r=2)
        assert va == pytest.approx(vb, abs=1e-9)

    def test_scaling_linearity(self):
        mat = random_psd(6, 11)
        v1, s1 = brute_force_opt(mat.entries, k=2, r=1)
        v2, s2 = brute_force_opt(2.5 * mat.entries, k=2, r=1)
        assert v2 == pytest.approx(2.5 * v1, rel=1e-12)
        assert s1 == s2

    def test_guard_reports_count(self):
        with pytest.raises(GuardError) as exc:
            brute_force_opt(np.eye(40), k=20, r=2, guard=10**6)
        assert exc.value.count > 10**6

    def test_bad_ranks(self):
        with pytest.raises(InputError):
            brute_force_opt(np.eye(4), k=2, r=3)


class TestLocalSearchExactNeighborhood:
    def test_optimum_is_fixed_point(self):
        mat = random_psd(8, 44)
        _, sup = brute_force_opt(mat, k=3, r=2)
        assert local_search_exact_neighborhood(mat, 3, 2, list(sup)) == sup

    def test_diagonal_converges_to_top_entries(self):
        # r=2 makes {0,1} the unique strict optimum (value 7)
        a = np.diag([4.0, 3.0, 2.0, 1.0])
        assert local_search_exact_neighborhood(a, 2, 2, [2, 3]) == (0, 1)

    def test_never_worse_than_start(self):
        mat = random_psd(8, 45)
        for seed in range(5):
            rng = np.random.RandomState(seed)
            s0 = sorted(rng.choice(8, size=3, replace=False).tolist())
            end = local_search_exact_neighborhood(mat, 3, 2, s0)
            v0, _ = exact_support_objective(mat, s0, r=2)
            v1, _ = exact_support_objective(mat, list(end), r=2)
            assert v1 >= v0 - 1e-12

    def test_bad_support_size(self):
        with pytest.raises(InputError):
            local_search_exact_neighborhood(np.eye(5), 3, 1, [0, 1])
