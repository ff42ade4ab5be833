import numpy as np
import pytest

from rspca import (
    InputError,
    NotPsdError,
    SymmetricMatrix,
    eigendecompose,
    psd_sqrt,
    submatrix,
    top_r_eigsum,
)

from conftest import random_psd


class TestSymmetricMatrix:
    def test_symmetrizes_exactly(self):
        a = np.array([[1.0, 2.0 + 1e-12], [2.0, 3.0]])
        m = SymmetricMatrix.from_array(a)
        assert np.array_equal(m.entries, m.entries.T)

    def test_rejects_asymmetry(self):
        with pytest.raises(InputError):
            SymmetricMatrix.from_array([[1.0, 2.0], [0.0, 1.0]])

    def test_rejects_nonsquare_and_nonfinite(self):
        with pytest.raises(InputError):
            SymmetricMatrix.from_array(np.zeros((2, 3)))
        with pytest.raises(InputError):
            SymmetricMatrix.from_array([[np.nan, 0.0], [0.0, 1.0]])

    def test_entries_read_only(self):
        m = SymmetricMatrix.from_array(np.eye(2))
        with pytest.raises(ValueError):
            m.entries[0, 0] = 5.0


class TestEigendecompose:
    def test_identity(self):
        eig = eigendecompose(SymmetricMatrix.from_array(np.eye(3)))
        np.testing.assert_allclose(eig.eigenvalues, np.ones(3))
        np.testing.assert_allclose(eig.eigenvectors.T @ eig.eigenvectors,
                                   np.eye(3), atol=1e-10)

    def test_diagonal(self):
        eig = eigendecompose(np.diag([4.0, 1.0]))
        np.testing.assert_allclose(eig.eigenvalues, [4.0, 1.0])
        np.testing.assert_allclose(eig.eigenvectors, np.eye(2), atol=1e-12)

    def test_2x2_closed_form(self):
        eig = eigendecompose(np.array([[2.0, 1.0], [1.0, 2.0]]))
        np.testing.assert_allclose(eig.eigenvalues, [3.0, 1.0], atol=1e-12)
        s = 1.0 / np.sqrt(2.0)
        # sign convention: largest-magnitude component positive, first on ties
        np.testing.assert_allclose(eig.eigenvectors[:, 0], [s, s], atol=1e-12)
        np.testing.assert_allclose(eig.eigenvectors[:, 1], [s, -s], atol=1e-12)

    def test_sorted_nonincreasing(self):
        for seed in range(5):
            eig = eigendecompose(random_psd(8, seed))
            assert np.all(np.diff(eig.eigenvalues) <= 1e-12)

    def test_reconstruction_and_orthonormality(self):
        for seed in range(10):
            rng = np.random.RandomState(100 + seed)
            a = rng.randn(7, 7)
            a = (a + a.T) / 2.0
            eig = eigendecompose(a)
            err = np.linalg.norm(eig.reconstruct() - a)
            assert err <= 1e-8 * max(1.0, np.linalg.norm(a))
            gram = eig.eigenvectors.T @ eig.eigenvectors
            assert np.max(np.abs(gram - np.eye(7))) <= 1e-10

    def test_nonfinite_rejected(self):
        with pytest.raises(InputError):
            eigendecompose(np.array([[np.inf, 0.0], [0.0, 1.0]]))


class TestPsdSqrt:
    def test_identity(self):
        np.testing.assert_allclose(psd_sqrt(np.eye(4)), np.eye(4), atol=1e-12)

    def test_diagonal(self):
        np.testing.assert_allclose(psd_sqrt(np.diag([4.0, 9.0])),
                                   np.diag([2.0, 3.0]), atol=1e-12)

    def test_random_psd_squares_back(self):
        mat = random_psd(6, 3)
        root = psd_sqrt(mat)
        err = np.linalg.norm(root @ root - mat.entries)
        assert err <= 1e-7 * max(1.0, np.linalg.norm(mat.entries))

    def test_projector_idempotent(self):
        rng = np.random.RandomState(4)
        q, _ = np.linalg.qr(rng.randn(6, 2))
        p = q @ q.T
        np.testing.assert_allclose(psd_sqrt((p + p.T) / 2.0), p, atol=1e-8)

    def test_clamps_roundoff_but_rejects_indefinite(self):
        # tiny negative eigenvalue within the clamp band
        nearly = np.diag([1.0, -1e-12])
        root = psd_sqrt(nearly)
        assert root[1, 1] == 0.0
        with pytest.raises(NotPsdError):
            psd_sqrt(np.diag([1.0, -1e-3]))


class TestSubmatrix:
    def test_principal_diagonal_slice(self):
        out = submatrix(SymmetricMatrix.from_array(np.diag([1.0, 2.0, 3.0])), [1, 2])
        assert isinstance(out, SymmetricMatrix)
        np.testing.assert_array_equal(out.entries, np.diag([2.0, 3.0]))

    def test_row_slice(self):
        a = np.arange(9, dtype=float).reshape(3, 3)
        a = (a + a.T) / 2.0
        out = submatrix(a, [0], [0, 1, 2])
        np.testing.assert_array_equal(out, a[[0], :])

    def test_rectangular_lookup(self):
        rng = np.random.RandomState(9)
        a = rng.randn(5, 5)
        a = (a + a.T) / 2.0
        out = submatrix(a, [1, 3], [0, 2])
        expected = [[a[1, 0], a[1, 2]], [a[3, 0], a[3, 2]]]
        np.testing.assert_array_equal(out, expected)

    def test_list_order_respected(self):
        a = np.diag([1.0, 2.0, 3.0])
        out = submatrix(a, [2, 0], [2, 0])
        np.testing.assert_array_equal(out, np.diag([3.0, 1.0]))

    def test_errors(self):
        a = np.eye(3)
        with pytest.raises(InputError):
            submatrix(a, [0, 3])
        with pytest.raises(InputError):
            submatrix(a, [1, 1])


def test_top_r_eigsum():
    mat = random_psd(6, 7)
    vals = np.linalg.eigvalsh(mat.entries)
    assert top_r_eigsum(mat, 2) == pytest.approx(vals[-2:].sum(), abs=1e-10)
    assert top_r_eigsum(mat, 0) == 0.0
    with pytest.raises(InputError):
        top_r_eigsum(mat, 7)
