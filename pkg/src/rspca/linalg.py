"""Symmetric-matrix containers and spectral primitives.

Everything downstream (search, bounds, instance generation) goes through the
conventions fixed here: eigenvalues sorted in non-increasing order, each
eigenvector's largest-magnitude component made positive, PSD square roots with
small negative round-off eigenvalues clamped to zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, NotPsdError

# Relative tolerance for "negative eigenvalue is just round-off" in psd_sqrt.
PSD_CLAMP_REL = 1e-8


def _as_entries(mat) -> np.ndarray:
    """Accept a SymmetricMatrix or a plain square ndarray."""
    if isinstance(mat, SymmetricMatrix):
        return mat.entries
    arr = np.asarray(mat, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InputError(f"expected a square matrix, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class SymmetricMatrix:
    """A real symmetric matrix with read-only entries.

    Construct via :meth:`from_array`, which checks symmetry up to ``atol``
    and then symmetrizes exactly so downstream code never sees asymmetry.
    """

    entries: np.ndarray

    @classmethod
    def from_array(cls, arr, atol: float = 1e-9) -> "SymmetricMatrix":
        a = np.asarray(arr, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InputError(f"expected a square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise InputError("matrix has non-finite entries")
        asym = np.max(np.abs(a - a.T)) if a.size else 0.0
        if asym > atol:
            raise InputError(f"matrix is not symmetric: max |A - A^T| = {asym:.3e}")
        sym = (a + a.T) / 2.0
        sym.setflags(write=False)
        return cls(sym)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.entries))

    def diagonal(self) -> np.ndarray:
        return np.diagonal(self.entries).copy()


@dataclass(frozen=True)
class EigenDecomposition:
    """Full eigendecomposition of a symmetric matrix.

    ``eigenvalues`` are non-increasing; column ``i`` of ``eigenvectors`` is
    the unit eigenvector for ``eigenvalues[i]`` with its largest-magnitude
    component positive (first such component on ties).
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.T


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip columns so each one's largest-|entry| component is positive."""
    out = vectors.copy()
    lead = np.argmax(np.abs(out), axis=0)
    for i, m in enumerate(lead):
        if out[m, i] < 0:
            out[:, i] = -out[:, i]
    return out


def eigendecompose(mat) -> EigenDecomposition:
    """Eigendecompose a symmetric matrix under the package conventions."""
    a = _as_entries(mat)
    if not np.all(np.isfinite(a)):
        raise InputError("matrix has non-finite entries")
    vals, vecs = np.linalg.eigh((a + a.T) / 2.0)
    order = np.argsort(vals)[::-1]
    vals = np.ascontiguousarray(vals[order])
    vecs = _fix_signs(np.ascontiguousarray(vecs[:, order]))
    vals.setflags(write=False)
    vecs.setflags(write=False)
    return EigenDecomposition(vals, vecs)


def psd_sqrt(mat, eig: EigenDecomposition | None = None) -> np.ndarray:
    """Symmetric PSD square root.

    Eigenvalues in ``[-PSD_CLAMP_REL * lambda_max, 0)`` are treated as
    round-off and clamped to zero; anything more negative raises
    :class:`NotPsdError`.
    """
    if eig is None:
        eig = eigendecompose(mat)
    vals = eig.eigenvalues
    lam_max = float(vals[0]) if vals.size else 0.0
    floor = -PSD_CLAMP_REL * max(lam_max, 0.0)
    if vals.size and float(vals[-1]) < floor:
        raise NotPsdError(
            f"matrix is not PSD: min eigenvalue {vals[-1]:.6e} "
            f"(clamp floor {floor:.6e})"
        )
    clamped = np.clip(vals, 0.0, None)
    v = eig.eigenvectors
    root = (v * np.sqrt(clamped)) @ v.T
    return (root + root.T) / 2.0


def _check_index_list(idx: np.ndarray, d: int, what: str) -> None:
    if idx.size and (idx.min() < 0 or idx.max() >= d):
        raise InputError(f"{what} indices out of range [0, {d - 1}]")
    if np.unique(idx).size != idx.size:
        raise InputError(f"{what} indices contain duplicates")


def submatrix(mat, rows, cols=None):
    """Submatrix A[rows, cols] (0-based; list order fixes row/column order).

    ``cols`` defaults to ``rows``, giving the principal submatrix; a
    principal slice of a SymmetricMatrix is again a SymmetricMatrix.
    """
    a = _as_entries(mat)
    ridx = np.asarray(list(rows), dtype=int)
    principal = cols is None
    cidx = ridx if principal else np.asarray(list(cols), dtype=int)
    _check_index_list(ridx, a.shape[0], "row")
    _check_index_list(cidx, a.shape[0], "column")
    if ridx.size == 0 or cidx.size == 0:
        out = np.zeros((ridx.size, cidx.size))
    else:
        out = a[np.ix_(ridx, cidx)]
    if principal and isinstance(mat, SymmetricMatrix):
        return SymmetricMatrix.from_array(out, atol=0.0)
    return out


def top_r_eigsum(mat, r: int) -> float:
    """Sum of the ``r`` largest eigenvalues of a symmetric matrix."""
    a = _as_entries(mat)
    if not 0 <= r <= a.shape[0]:
        raise InputError(f"r={r} out of range for dim {a.shape[0]}")
    if r == 0 or a.shape[0] == 0:
        return 0.0
    vals = np.linalg.eigvalsh((a + a.T) / 2.0)
    return float(np.sum(vals[-r:]))
