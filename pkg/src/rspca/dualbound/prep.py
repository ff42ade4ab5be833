"""Spectral preprocessing for the convex upper-bound model.

For each eigenvector a_j of A, the projection g_ji = a_j^T v_i of a feasible
factor column is confined to [-theta_j, theta_j], where theta_j is the root
of the top-k mass of a_j (Cauchy-Schwarz on the k nonzero rows). Each g_ji
with j in a small head set gets a uniform breakpoint grid for the
piecewise-linear overestimation of g^2; eigenvalues below the threshold
lambda_th are handled in aggregate instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InputError
from ..linalg import EigenDecomposition, _as_entries, eigendecompose

DEFAULT_BREAKPOINT_HALF_COUNT = 40
DEFAULT_HEAD_SIZE = 3


@dataclass(frozen=True)
class SpectralPrep:
    """Eigendecomposition plus PLA grid data for one (A, k, N) combination.

    ``gamma[j]`` holds the 2N+1 uniform breakpoints of [-theta_j, theta_j].
    ``jplus`` are the indices with eigenvalue strictly above ``lambda_th``
    (at most ``head size`` many; ties shrink the set), ``jminus`` the rest.
    """

    eig: EigenDecomposition
    k: int
    n_breakpoints: int
    theta: np.ndarray
    gamma: np.ndarray = field(repr=False)
    lambda_th: float
    jplus: tuple[int, ...]
    jminus: tuple[int, ...]


def spectral_prep(mat, k: int, n_breakpoints: int = DEFAULT_BREAKPOINT_HALF_COUNT,
                  jplus_size: int | None = None,
                  eig: EigenDecomposition | None = None) -> SpectralPrep:
    """Compute theta ranges, breakpoint grids, and the eigenvalue split.

    ``jplus_size`` defaults to min(3, d) so small blocks still work; explicit
    values must lie in [1, d]. ``eig`` may be passed to reuse an existing
    eigendecomposition of the same matrix (theta and the grids still depend
    on k and N).
    """
    a = _as_entries(mat)
    d = a.shape[0]
    if not 1 <= k <= d:
        raise InputError(f"need 1 <= k <= d, got k={k}, d={d}")
    if n_breakpoints < 1:
        raise InputError(f"n_breakpoints must be >= 1, got {n_breakpoints}")
    if jplus_size is None:
        jplus_size = min(DEFAULT_HEAD_SIZE, d)
    if not 1 <= jplus_size <= d:
        raise InputError(f"need 1 <= jplus_size <= d, got {jplus_size}")
    if eig is None:
        eig = eigendecompose(a)

    sq = eig.eigenvectors**2
    top_k = np.sort(sq, axis=0)[::-1][:k]
    theta = np.sqrt(top_k.sum(axis=0))

    n = n_breakpoints
    steps = np.arange(-n, n + 1) / n
    gamma = theta[:, None] * steps[None, :]

    vals = eig.eigenvalues
    lambda_th = float(vals[min(jplus_size, d - 1)])
    jplus = tuple(int(j) for j in range(d) if vals[j] > lambda_th)
    jminus = tuple(j for j in range(d) if j not in set(jplus))

    theta.setflags(write=False)
    gamma.setflags(write=False)
    return SpectralPrep(eig=eig, k=k, n_breakpoints=n, theta=theta,
                        gamma=gamma, lambda_th=lambda_th,
                        jplus=jplus, jminus=jminus)


def pla_gap_bound(theta_j: float, n_breakpoints: int) -> float:
    """Worst overestimation of g^2 by its chordal interpolant on the grid.

    On each interval of width theta/N the chord exceeds g^2 by at most
    (theta/N)^2 / 4, attained at interval midpoints.
    """
    if n_breakpoints < 1:
        raise InputError(f"n_breakpoints must be >= 1, got {n_breakpoints}")
    return theta_j**2 / (4.0 * n_breakpoints**2)


def pla_additive_term(prep: SpectralPrep, r: int) -> float:
    """Additive slack of the affine guarantee: sum_j r*lambda_j*theta_j^2/(4N^2)."""
    if r < 1:
        raise InputError(f"r must be >= 1, got {r}")
    per = prep.theta**2 / (4.0 * prep.n_breakpoints**2)
    return float(r * np.sum(prep.eig.eigenvalues * per))


def baseline1(mat, k: int) -> float:
    """Sum of the k largest diagonal entries; a valid (crude) upper bound.

    Budget 0 sums nothing and returns 0.
    """
    a = _as_entries(mat)
    if not 0 <= k <= a.shape[0]:
        raise InputError(f"need 0 <= k <= d, got k={k}, d={a.shape[0]}")
    if k == 0:
        return 0.0
    diag = np.sort(np.diagonal(a))
    return float(diag[-k:].sum())


@dataclass(frozen=True)
class GuaranteeCheck:
    """Outcome of the two-sided affine guarantee check.

    Margins are the slack by which each inequality holds (negative means
    violated); ``passed`` requires both nonnegative up to tolerance.
    """

    passed: bool
    lower_margin: float
    upper_margin: float


def check_affine_guarantee(ub: float, opt: float, rho: float,
                           additive: float) -> GuaranteeCheck:
    """Check opt <= ub <= rho^2 * opt + additive, tolerance 1e-6*max(1,opt)."""
    tol = 1e-6 * max(1.0, abs(opt))
    lower = ub - opt
    upper = rho**2 * opt + additive - ub
    return GuaranteeCheck(passed=(lower >= -tol and upper >= -tol),
                          lower_margin=float(lower), upper_margin=float(upper))
