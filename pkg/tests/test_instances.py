import numpy as np
import pytest

from rspca import (
    InputError,
    ParseError,
    SampleMatrix,
    SpikedSpec,
    SymmetricMatrix,
    draw_spiked_samples,
    generate_spiked_instance,
    load_matrix,
    population_spiked,
    sample_covariance,
    save_dense_csv,
    top_diagonal_subinstance,
)


class TestPopulationSpiked:
    def test_spiked_block_values(self):
        # kA=2: u1=(1,1)/sqrt2, u2=(1,-1)/sqrt2 -> 55/2 +- 52/2
        sigma = population_spiked(SpikedSpec(d=6, ka=2, m_samples=1))
        np.testing.assert_allclose(sigma.entries[:2, :2],
                                   [[53.5, 1.5], [1.5, 53.5]], atol=1e-12)

    def test_identity_tail(self):
        sigma = population_spiked(SpikedSpec(d=6, ka=2, m_samples=1))
        assert sigma.entries[5, 5] == 1.0
        assert sigma.entries[4, 5] == 0.0

    def test_flat_block(self):
        sigma = population_spiked(SpikedSpec(d=8, ka=2, m_samples=1))
        np.testing.assert_array_equal(sigma.entries[2:4, 2:4], 50.0 * np.eye(2))

    def test_trace_formula(self):
        for d, ka in ((6, 2), (10, 4), (20, 6)):
            sigma = population_spiked(SpikedSpec(d=d, ka=ka, m_samples=1))
            assert sigma.trace() == pytest.approx(107 + 50 * ka + (d - 2 * ka))

    def test_planted_vectors_orthogonal(self):
        sigma = population_spiked(SpikedSpec(d=12, ka=4, m_samples=1))
        vals = np.linalg.eigvalsh(sigma.entries[:4, :4])
        assert vals.max() == pytest.approx(55.0, abs=1e-10)

    def test_odd_ka_rejected(self):
        with pytest.raises(InputError):
            SpikedSpec(d=10, ka=3, m_samples=5)

    def test_other_invariants(self):
        with pytest.raises(InputError):
            SpikedSpec(d=5, ka=4, m_samples=5)  # 2*ka > d
        with pytest.raises(InputError):
            SpikedSpec(d=10, ka=4, m_samples=0)


class TestSampleCovariance:
    def test_single_column(self):
        x = SampleMatrix(np.array([[1.0], [0.0]]))
        np.testing.assert_array_equal(sample_covariance(x).entries,
                                      [[1.0, 0.0], [0.0, 0.0]])

    def test_two_unit_columns(self):
        x = SampleMatrix(np.array([[1.0, 0.0], [0.0, 1.0]]))
        np.testing.assert_allclose(sample_covariance(x).entries, np.eye(2) / 2.0)

    def test_matches_explicit_sum(self):
        rng = np.random.RandomState(2)
        cols = rng.randn(2, 3)
        expected = sum(np.outer(cols[:, i], cols[:, i]) for i in range(3)) / 3.0
        got = sample_covariance(SampleMatrix(cols)).entries
        np.testing.assert_allclose(got, expected, atol=1e-12)

    def test_output_psd(self):
        rng = np.random.RandomState(3)
        a = sample_covariance(SampleMatrix(rng.randn(5, 4)))
        vals = np.linalg.eigvalsh(a.entries)
        assert vals.min() >= -1e-10 * max(vals.max(), 1.0)


class TestGenerator:
    def test_deterministic(self):
        spec = SpikedSpec(d=10, ka=4, m_samples=30, seed=11)
        a = generate_spiked_instance(spec)
        b = generate_spiked_instance(spec)
        assert np.array_equal(a.entries, b.entries)

    def test_seed_changes_output(self):
        a = generate_spiked_instance(SpikedSpec(d=10, ka=4, m_samples=30, seed=1))
        b = generate_spiked_instance(SpikedSpec(d=10, ka=4, m_samples=30, seed=2))
        assert not np.array_equal(a.entries, b.entries)

    def test_large_m_approaches_population(self):
        # law of large numbers at M=1e5: entrywise error well under 0.5
        spec = SpikedSpec(d=10, ka=4, m_samples=100_000, seed=0)
        a = generate_spiked_instance(spec)
        sigma = population_spiked(spec)
        assert np.max(np.abs(a.entries - sigma.entries)) <= 0.5

    def test_samples_shape(self):
        x = draw_spiked_samples(SpikedSpec(d=8, ka=2, m_samples=17, seed=3))
        assert x.d == 8 and x.m == 17


class TestDenseCsv:
    def test_round_trip_bitwise(self, tmp_path):
        rng = np.random.RandomState(5)
        g = rng.randn(7, 7)
        mat = SymmetricMatrix.from_array(g @ g.T)
        path = str(tmp_path / "a.csv")
        save_dense_csv(path, mat)
        again = load_matrix(path)
        assert np.array_equal(again.entries, mat.entries)
        save_dense_csv(str(tmp_path / "b.csv"), again)
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_tiny_literal(self, tmp_path):
        p = tmp_path / "i.csv"
        p.write_text("2\n1,0\n0,1\n")
        np.testing.assert_array_equal(load_matrix(str(p)).entries, np.eye(2))

    def test_parse_error_reports_line(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("2\n1,0\n0,oops\n")
        with pytest.raises(ParseError) as info:
            load_matrix(str(p))
        assert "line 3" in str(info.value)

    def test_asymmetry_rejected(self, tmp_path):
        p = tmp_path / "asym.csv"
        p.write_text("2\n1,0.5\n0,1\n")
        with pytest.raises(InputError):
            load_matrix(str(p))

    def test_missing_file(self):
        with pytest.raises(InputError):
            load_matrix("/nonexistent/path.csv")


class TestMatrixMarket:
    def _write(self, tmp_path, body):
        p = tmp_path / "m.mtx"
        p.write_text("%%MatrixMarket matrix coordinate real symmetric\n" + body)
        return str(p)

    def test_mirroring(self, tmp_path):
        path = self._write(tmp_path, "2 2 2\n1 1 1.0\n2 1 0.5\n")
        a = load_matrix(path, fmt="matrix-market-sym").entries
        assert a[0, 1] == 0.5 and a[1, 0] == 0.5

    def test_duplicates_accumulate(self, tmp_path):
        path = self._write(tmp_path, "2 2 3\n1 1 1.0\n2 1 0.25\n2 1 0.25\n")
        a = load_matrix(path, fmt="matrix-market-sym").entries
        assert a[1, 0] == 0.5

    def test_bad_header(self, tmp_path):
        p = tmp_path / "h.mtx"
        p.write_text("%%MatrixMarket matrix array real general\n1 1\n1.0\n")
        with pytest.raises(ParseError) as info:
            load_matrix(str(p), fmt="matrix-market-sym")
        assert "line 1" in str(info.value)

    def test_entry_count_mismatch(self, tmp_path):
        path = self._write(tmp_path, "2 2 3\n1 1 1.0\n2 2 1.0\n")
        with pytest.raises(ParseError):
            load_matrix(path, fmt="matrix-market-sym")

    def test_unknown_format(self, tmp_path):
        p = tmp_path / "x.csv"
        p.write_text("1\n1\n")
        with pytest.raises(InputError):
            load_matrix(str(p), fmt="hdf5")


class TestTopDiagonalSubinstance:
    def test_small_example(self):
        s, block = top_diagonal_subinstance(np.diag([1.0, 3.0, 2.0]), 2)
        assert list(s) == [1, 2]
        np.testing.assert_array_equal(block.entries, np.diag([3.0, 2.0]))

    def test_full_selection(self):
        mat = SymmetricMatrix.from_array(np.diag([2.0, 1.0]))
        s, block = top_diagonal_subinstance(mat, 2)
        assert list(s) == [0, 1]
        np.testing.assert_array_equal(block.entries, mat.entries)

    def test_matches_sorting_oracle(self):
        rng = np.random.RandomState(8)
        g = rng.randn(8, 8)
        mat = SymmetricMatrix.from_array(g @ g.T)
        s, _ = top_diagonal_subinstance(mat, 4)
        diag = np.diagonal(mat.entries)
        expected = sorted(sorted(range(8), key=lambda j: (-diag[j], j))[:4])
        assert list(s) == expected

    def test_tie_breaks_by_smaller_index(self):
        s, _ = top_diagonal_subinstance(np.diag([1.0, 1.0, 1.0]), 2)
        assert list(s) == [0, 1]
