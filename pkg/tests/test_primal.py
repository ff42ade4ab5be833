import numpy as np
import pytest

from rspca import (
    InputError,
    SymmetricMatrix,
    brute_force_opt,
    exact_support_objective,
    greedy_search,
    multistart,
    proxy_objective,
    psd_sqrt,
    swap_scores,
)
from rspca.primal import resolve_threads

from conftest import random_psd


class TestExactSupportObjective:
    def test_identity(self):
        val, _ = exact_support_objective(np.eye(5), [0, 2, 4], r=2)
        assert val == pytest.approx(2.0)

    def test_2x2_closed_form(self):
        val, fac = exact_support_objective(np.array([[2.0, 1.0], [1.0, 2.0]]),
                                           [0, 1], r=1)
        assert val == pytest.approx(3.0)
        v = fac.embed()
        quad = v.T @ np.array([[2.0, 1.0], [1.0, 2.0]]) @ v
        assert quad.item() == pytest.approx(3.0)

    def test_diagonal(self):
        val, _ = exact_support_objective(np.diag([4.0, 3.0, 2.0, 1.0]), [0, 2], r=2)
        assert val == pytest.approx(6.0)

    def test_support_smaller_than_r(self):
        with pytest.raises(InputError):
            exact_support_objective(np.eye(4), [1], r=2)


class TestProxyObjective:
    def test_identity_matrix(self):
        d, k, r = 7, 3, 2
        rng = np.random.RandomState(0)
        m, _ = np.linalg.qr(rng.randn(k, r))
        val = proxy_objective(np.eye(d), [0, 1, 2], m)
        assert val == pytest.approx(d - r)

    def test_square_m_leaves_tail(self):
        mat = random_psd(6, 1)
        ah = psd_sqrt(mat)
        s = [1, 3]
        rng = np.random.RandomState(2)
        m, _ = np.linalg.qr(rng.randn(2, 2))
        tail = [j for j in range(6) if j not in s]
        expected = np.linalg.norm(ah[tail, :]) ** 2
        assert proxy_objective(ah, s, m) == pytest.approx(expected, abs=1e-9)

    def test_optimal_m_gives_trace_identity(self):
        mat = random_psd(6, 4)
        ah = psd_sqrt(mat)
        s = [0, 2, 5]
        val, fac = exact_support_objective(mat, s, r=2)
        fbar = proxy_objective(ah, s, fac.block)
        assert fbar + val == pytest.approx(mat.trace(), abs=1e-8)

    def test_nonorthonormal_m_rejected(self):
        with pytest.raises(InputError):
            proxy_objective(np.eye(4), [0, 1], np.ones((2, 2)))


class TestSwapScores:
    def test_diagonal_residual(self):
        a = np.diag([4.0, 3.0, 2.0, 1.0])
        ah = psd_sqrt(a)
        _, fac = exact_support_objective(a, [1, 2], r=1)
        sc = swap_scores(ah, [1, 2], fac.block)
        # R = (3 + 2) - 3 on the diagonal instance
        assert sc.residual == pytest.approx(2.0, abs=1e-12)

    def test_j_out_smallest_row_norm(self):
        a = np.diag([4.0, 3.0, 2.0, 1.0])
        ah = psd_sqrt(a)
        _, fac = exact_support_objective(a, [2, 3], r=1)
        sc = swap_scores(ah, [2, 3], fac.block)
        assert sc.j_out == 3
        assert sc.delta_out[3] == pytest.approx(0.0, abs=1e-12)

    def test_rank_one_matches_recompute(self):
        # delta_in via the rank-one path against a from-scratch residual
        for seed in range(6):
            mat = random_psd(8, 30 + seed)
            ah = psd_sqrt(mat)
            s = [1, 4, 6]
            _, fac = exact_support_objective(mat, s, r=2)
            sc = swap_scores(ah, s, fac.block)
            slot = s.index(sc.j_out)
            proj = np.eye(3) - fac.block @ fac.block.T
            for j, got in sc.delta_in.items():
                rows = list(s)
                rows[slot] = j
                resid_j = np.linalg.norm(proj @ ah[rows, :]) ** 2
                want = float(mat.entries[j, j] - resid_j)
                assert got == pytest.approx(want, abs=1e-8)


class TestGreedySearch:
    def test_identity_stops_immediately(self):
        sol = greedy_search(SymmetricMatrix.from_array(np.eye(6)), k=3, r=2,
                            s0=[0, 1, 2])
        assert sol.iterations == 0
        assert sol.objective == pytest.approx(2.0)

    def test_diagonal_start_is_strict_fixed_point(self):
        # every 1-swap from {2,3} has zero gain here, and zero-gain moves
        # are rejected; random restarts recover the optimum instead
        a = SymmetricMatrix.from_array(np.diag([4.0, 3.0, 2.0, 1.0]))
        sol = greedy_search(a, k=2, r=1, s0=[2, 3])
        assert sol.support == (2, 3)
        assert sol.iterations == 0
        assert sol.trajectory == (8.0,)
        ms = multistart(a, k=2, r=1, restarts=20, seed=0)
        assert sorted(ms.support) == [0, 1]
        assert ms.objective == pytest.approx(4.0)

    def test_trajectory_strictly_decreasing(self):
        for seed in range(10):
            mat = random_psd(10, 60 + seed)
            rng = np.random.RandomState(seed)
            s0 = sorted(rng.choice(10, size=3, replace=False).tolist())
            sol = greedy_search(mat, k=3, r=2, s0=s0)
            traj = np.asarray(sol.trajectory)
            assert np.all(np.diff(traj) < 0.0)

    def test_objective_matches_support_eigensum(self):
        mat = random_psd(9, 77)
        sol = greedy_search(mat, k=4, r=2, s0=[0, 1, 2, 3])
        val, _ = exact_support_objective(mat, sorted(sol.support), r=2)
        assert sol.objective == pytest.approx(val, abs=1e-8)

    def test_factor_feasible(self):
        mat = random_psd(8, 13)
        sol = greedy_search(mat, k=3, r=2, s0=[5, 6, 7])
        gram = sol.factor.block.T @ sol.factor.block
        assert np.max(np.abs(gram - np.eye(2))) <= 1e-9
        assert len(sol.factor.support) == 3

    def test_bad_start(self):
        with pytest.raises(InputError):
            greedy_search(random_psd(5, 0), k=2, r=1, s0=[0, 1, 2])


class TestMultistart:
    def test_single_restart_reduces_to_one_search(self):
        mat = random_psd(8, 21)
        one = multistart(mat, k=3, r=2, restarts=1, seed=9)
        assert len(one.support) == 3
        val, _ = exact_support_objective(mat, sorted(one.support), r=2)
        assert one.objective == pytest.approx(val, abs=1e-8)

    def test_deterministic(self):
        mat = random_psd(10, 22)
        a = multistart(mat, k=3, r=2, restarts=25, seed=4)
        b = multistart(mat, k=3, r=2, restarts=25, seed=4)
        assert a.support == b.support
        assert a.objective == b.objective

    def test_threaded_matches_serial(self):
        mat = random_psd(10, 23)
        serial = multistart(mat, k=3, r=2, restarts=16, seed=7, threads=1)
        threaded = multistart(mat, k=3, r=2, restarts=16, seed=7, threads=4)
        assert serial.support == threaded.support
        assert serial.objective == threaded.objective

    def test_resolve_threads(self, monkeypatch):
        monkeypatch.delenv("RSPCA_THREADS", raising=False)
        assert resolve_threads(None) >= 1
        assert resolve_threads(5) == 5
        monkeypatch.setenv("RSPCA_THREADS", "3")
        assert resolve_threads(None) == 3
        monkeypatch.setenv("RSPCA_THREADS", "0")
        assert resolve_threads(None) >= 1
        monkeypatch.setenv("RSPCA_THREADS", "lots")
        with pytest.raises(InputError):
            resolve_threads(None)
        with pytest.raises(InputError):
            resolve_threads(-2)

    def test_usually_finds_oracle_optimum(self):
        hits = 0
        for seed in range(10):
            mat = random_psd(10, 200 + seed)
            opt, _ = brute_force_opt(mat, 3, 2)
            sol = multistart(mat, k=3, r=2, restarts=50, seed=seed)
            if sol.objective >= opt - 1e-8 * max(1.0, opt):
                hits += 1
        assert hits >= 8
