"""Feasible factors, relaxation membership checks, and guarantee constants.

The feasible set consists of d-by-r matrices with orthonormal columns and at
most k nonzero rows. Two convex supersets are used by the bounding code; this
module provides point-membership tests for both, a random feasible-point
generator, and the multiplicative approximation constants the bounds carry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .instances import _rng, _standard_normal


@dataclass(frozen=True)
class OrthonormalSparseFactor:
    """Nonzero rows of a row-sparse orthonormal factor.

    ``support`` lists the nonzero row indices (ascending, at most k of them);
    ``block`` holds those rows, with orthonormal columns.
    """

    d: int
    r: int
    k: int
    support: tuple[int, ...]
    block: np.ndarray

    def __post_init__(self):
        block = np.asarray(self.block, dtype=float)
        object.__setattr__(self, "block", block)
        object.__setattr__(self, "support", tuple(int(j) for j in self.support))
        if not 1 <= self.r <= self.k <= self.d:
            raise InputError(
                f"need 1 <= r <= k <= d, got r={self.r}, k={self.k}, d={self.d}")
        s = self.support
        if len(s) > self.k:
            raise InputError(f"support size {len(s)} exceeds k={self.k}")
        if len(set(s)) != len(s):
            raise InputError("support contains duplicates")
        if s and (min(s) < 0 or max(s) >= self.d):
            raise InputError(f"support indices out of range [0, {self.d - 1}]")
        if block.shape != (len(s), self.r):
            raise InputError(
                f"block shape {block.shape} does not match (|S|, r) = "
                f"({len(s)}, {self.r})")
        gram = block.T @ block
        err = float(np.linalg.norm(gram - np.eye(self.r)))
        if err > 1e-9:
            raise InputError(f"block columns not orthonormal: ||B^T B - I|| = {err:.3e}")

    def embed(self) -> np.ndarray:
        """Dense d-by-r matrix with the block placed on the support rows."""
        v = np.zeros((self.d, self.r))
        v[list(self.support), :] = self.block
        return v


def sample_feasible(d: int, r: int, k: int, seed: int) -> OrthonormalSparseFactor:
    """Random feasible factor: uniform k-subset support, Haar orthonormal block."""
    if not 1 <= r <= k <= d:
        raise InputError(f"need 1 <= r <= k <= d, got r={r}, k={k}, d={d}")
    rng = _rng(seed, 1)
    support = np.sort(rng.choice(d, size=k, replace=False))
    gauss = _standard_normal(rng, (k, r))
    q, rr = np.linalg.qr(gauss)
    # make the QR factor unique (positive diagonal of R) so output is Haar
    q = q * np.sign(np.where(np.diagonal(rr) == 0, 1.0, np.diagonal(rr)))
    return OrthonormalSparseFactor(d=d, r=r, k=k,
                                   support=tuple(int(j) for j in support),
                                   block=q)


@dataclass(frozen=True)
class MembershipResult:
    """Outcome of a relaxation membership test.

    ``member`` is True when no constraint family is violated beyond tol. On
    violation, ``violated`` names the first failing family and ``amount`` is
    the magnitude of the worst violation in it. ``resolution`` is set by the
    grid-based test to qualify a "member" verdict.
    """

    member: bool
    violated: str | None = None
    amount: float = 0.0
    resolution: int | None = None


def cr2_membership(v, k: int, tol: float = 1e-9) -> MembershipResult:
    """Membership in the second convex relaxation.

    Families checked in order: column squared norms ≤ 1; column sums/differences
    ``||v_i ± v_j||² ≤ 2`` for all pairs; column l1 norms ≤ √k; row-norm sum
    ≤ √(rk). Each up to additive ``tol``.
    """
    mat = np.asarray(v, dtype=float)
    if mat.ndim != 2:
        raise InputError(f"expected a d-by-r matrix, got {mat.ndim}-d array")
    if not np.all(np.isfinite(mat)):
        raise InputError("matrix has non-finite entries")
    d, r = mat.shape
    if not 1 <= r <= k <= d:
        raise InputError(f"need 1 <= r <= k <= d, got r={r}, k={k}, d={d}")

    col_sq = np.sum(mat * mat, axis=0)
    worst = float(np.max(col_sq) - 1.0)
    if worst > tol:
        return MembershipResult(False, "column-sqnorm", worst)

    worst = 0.0
    for i in range(r):
        for j in range(i + 1, r):
            for sign in (1.0, -1.0):
                val = float(np.sum((mat[:, i] + sign * mat[:, j]) ** 2)) - 2.0
                worst = max(worst, val)
    if worst > tol:
        return MembershipResult(False, "pair-norm", worst)

    worst = float(np.max(np.sum(np.abs(mat), axis=0)) - math.sqrt(k))
    if worst > tol:
        return MembershipResult(False, "column-l1", worst)

    worst = float(np.sum(np.linalg.norm(mat, axis=1)) - math.sqrt(r * k))
    if worst > tol:
        return MembershipResult(False, "row-norm-sum", worst)

    return MembershipResult(True)


def _sphere_grid(r: int, grid_resolution: int) -> np.ndarray:
    """Deterministic unit directions in R^r (r in {2, 3}).

    r=2 uses equally spaced half-circle angles (antipodal directions are
    equivalent for ``||Vx||_1``), so doubling the resolution keeps all old
    grid points. r=3 uses a Fibonacci sphere.
    """
    if grid_resolution < 1:
        raise InputError(f"grid_resolution must be >= 1, got {grid_resolution}")
    if r == 2:
        t = np.arange(grid_resolution) * (np.pi / grid_resolution)
        return np.stack([np.cos(t), np.sin(t)], axis=1)
    golden = (1.0 + math.sqrt(5.0)) / 2.0
    i = np.arange(grid_resolution) + 0.5
    phi = np.arccos(1.0 - 2.0 * i / grid_resolution)
    theta = 2.0 * np.pi * i / golden
    return np.stack([np.sin(phi) * np.cos(theta),
                     np.sin(phi) * np.sin(theta),
                     np.cos(phi)], axis=1)


def cr1_membership_approx(v, k: int, grid_resolution: int = 10_000,
                          tol: float = 1e-9) -> MembershipResult:
    """Membership in the first convex relaxation, resolution-limited.

    The operator norm and the row-norm sum are checked exactly. The 2-to-1
    norm ``max_{||x||=1} ||Vx||_1 ≤ √k`` is evaluated on a deterministic grid
    of unit directions, which lower-bounds the norm: a violation is a
    certificate, a pass only holds at the given resolution. Exact for r=1;
    r > 3 is not supported (the norm is hard to evaluate in general).
    """
    mat = np.asarray(v, dtype=float)
    if mat.ndim != 2:
        raise InputError(f"expected a d-by-r matrix, got {mat.ndim}-d array")
    if not np.all(np.isfinite(mat)):
        raise InputError("matrix has non-finite entries")
    d, r = mat.shape
    if not 1 <= r <= k <= d:
        raise InputError(f"need 1 <= r <= k <= d, got r={r}, k={k}, d={d}")
    if r > 3:
        raise InputError(f"2-to-1 norm check supports r <= 3 only, got r={r}")

    gram_vals = np.linalg.eigvalsh(mat.T @ mat)
    op_excess = float(math.sqrt(max(float(gram_vals[-1]), 0.0)) - 1.0)
    if op_excess > tol:
        return MembershipResult(False, "op-norm", op_excess)

    if r == 1:
        two_one = float(np.sum(np.abs(mat)))
        resolution = None
    else:
        grid = _sphere_grid(r, grid_resolution)
        two_one = float(np.max(np.sum(np.abs(mat @ grid.T), axis=0)))
        resolution = grid_resolution
    excess = two_one - math.sqrt(k)
    if excess > tol:
        return MembershipResult(False, "l21-norm", excess, resolution)

    row_excess = float(np.sum(np.linalg.norm(mat, axis=1)) - math.sqrt(r * k))
    if row_excess > tol:
        return MembershipResult(False, "row-norm-sum", row_excess)

    return MembershipResult(True, resolution=resolution)


def rho_constants(r: int) -> tuple[float, float]:
    """Approximation constants carried by the two relaxations.

    First component: 2 + max(6√(2π), 18√(log 50r)), natural log. Second:
    1 + √r. The squared constant bounds how far the relaxation optimum can
    sit above the true optimum (up to the discretization additive term).
    """
    if r < 1:
        raise InputError(f"r must be >= 1, got {r}")
    rho_cr1 = 2.0 + max(6.0 * math.sqrt(2.0 * math.pi),
                        18.0 * math.sqrt(math.log(50.0 * r)))
    rho_cr2 = 1.0 + math.sqrt(r)
    return rho_cr1, rho_cr2
