"""Dimension reduction: bound the full problem through a top-diagonal block.

Let S be the rows with the largest diagonal entries. Any feasible factor
splits into rows inside S and rows outside; if k_t of its k support rows
land in S, the objective decomposes into a block term (bounded by the
certified bound on A[S,S] with budget max(k_t, r)), a cross term (bounded
via 2 Tr(V1' X V2) <= sqrt(r)||X||_F for coupled sub-orthonormal V1, V2),
and a tail term (bounded by the diagonal-sum baseline on A[Sc,Sc] with
budget k - k_t). k_t is unknown, so take the max over k_t = 0..k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dualbound import branch_and_bound, build_cip_model, baseline1, spectral_prep
from .errors import InputError
from .instances import _rng, top_diagonal_subinstance
from .linalg import _as_entries, eigendecompose, submatrix

DEFAULT_RATIOS = (1.5, 2.0, 2.5, 5.0, 10.0)
DEFAULT_PER_CIP_TIME_LIMIT = 20.0


@dataclass(frozen=True)
class SubmatrixPlan:
    """One ratio's reduction: block indices and the per-k_t bound terms."""

    ratio: float
    s_rows: tuple[int, ...]
    sc_rows: tuple[int, ...]
    # one (block_bound, cross_bound, tail_bound) triple per k_t = 0..k
    per_ktilde: tuple[tuple[float, float, float], ...] = field(repr=False)
    bound: float
    best_ktilde: int


def cross_term_bound(mat, s_rows, sc_rows, ktilde: int, k: int, r: int) -> float:
    """Bound on twice the block/tail interaction term.

    Per row of S: sum of the (k - k_t) largest squared entries among the Sc
    columns; then the k_t largest of those row values. The interaction of a
    split factor touches at most k_t rows of S and k - k_t columns of Sc, so
    the Frobenius norm of the touched cross block is at most the root of
    that sum, and the factor coupling contributes sqrt(r).
    """
    a = _as_entries(mat)
    if not 0 <= ktilde <= k:
        raise InputError(f"need 0 <= ktilde <= k, got ktilde={ktilde}, k={k}")
    if r < 1:
        raise InputError(f"r must be >= 1, got {r}")
    if ktilde == 0 or ktilde == k or len(sc_rows) == 0:
        return 0.0
    cross_sq = a[np.ix_(list(s_rows), list(sc_rows))] ** 2
    take_cols = min(k - ktilde, cross_sq.shape[1])
    row_scores = np.sort(cross_sq, axis=1)[:, ::-1][:, :take_cols].sum(axis=1)
    top_rows = np.sort(row_scores)[::-1][:ktilde]
    return float(math.sqrt(r) * math.sqrt(top_rows.sum()))


def submatrix_upper_bound(mat, k: int, r: int, m: float,
                          per_cip_time_limit: float = DEFAULT_PER_CIP_TIME_LIMIT,
                          n_breakpoints: int | None = None,
                          ) -> tuple[float, SubmatrixPlan]:
    """Certified upper bound via the top-ceil(m*k) diagonal block.

    Runs the branch-and-bound once per distinct block budget max(k_t, r)
    (shared eigendecomposition of the block), then maximizes the three-term
    sum over k_t. Raises InputError when the block does not fit, i.e.
    ceil(m*k) > d; solve the whole matrix directly in that case.
    """
    a = _as_entries(mat)
    d = a.shape[0]
    if m < 1:
        raise InputError(f"ratio m must be >= 1, got {m}")
    if not 1 <= r <= k <= d:
        raise InputError(f"need 1 <= r <= k <= d, got r={r}, k={k}, d={d}")
    n_block = math.ceil(m * k)
    if n_block > d:
        raise InputError(
            f"ceil(m*k) = {n_block} exceeds d = {d}; solve the whole matrix instead")

    s_rows, block = top_diagonal_subinstance(mat, n_block)
    s_rows = tuple(int(j) for j in s_rows)
    s_set = set(s_rows)
    sc_rows = tuple(j for j in range(d) if j not in s_set)
    tail_block = submatrix(mat, list(sc_rows))

    eig = eigendecompose(block)
    kwargs = {} if n_breakpoints is None else {"n_breakpoints": n_breakpoints}
    cip_cache: dict[int, float] = {}

    def block_bound(budget: int) -> float:
        if budget not in cip_cache:
            prep = spectral_prep(block, budget, eig=eig, **kwargs)
            model = build_cip_model(prep, block, budget, r)
            report = branch_and_bound(model, time_limit=per_cip_time_limit)
            cip_cache[budget] = report.upper_bound
        return cip_cache[budget]

    per_ktilde = []
    best_val = -np.inf
    best_kt = 0
    for kt in range(k + 1):
        cip = block_bound(max(kt, r))
        cross = cross_term_bound(mat, s_rows, sc_rows, kt, k, r)
        tail = baseline1(tail_block, min(k - kt, len(sc_rows)))
        per_ktilde.append((cip, cross, tail))
        total = cip + cross + tail
        if total > best_val:
            best_val = total
            best_kt = kt

    plan = SubmatrixPlan(ratio=float(m), s_rows=s_rows,
                         sc_rows=sc_rows, per_ktilde=tuple(per_ktilde),
                         bound=float(best_val), best_ktilde=best_kt)
    return float(best_val), plan


@dataclass(frozen=True)
class CrossCheckResult:
    """Monte-Carlo verdict for the coupled cross-term inequality."""

    passed: bool
    trials: int
    max_lhs: float
    bound: float
    witness: tuple[np.ndarray, np.ndarray] | None = field(default=None, repr=False)


def proposition_cross_check(x, r: int, trials: int = 1000,
                            seed: int = 0) -> CrossCheckResult:
    """Sample coupled (V1, V2) and test 2*Tr(V1' X V2) <= sqrt(r)*||X||_F.

    The coupling (V1'V1 + V2'V2 = I) comes from orthonormalizing one stacked
    (m+n) x r Gaussian and splitting its rows. Returns a failing witness
    pair if any trial breaks the inequality by more than 1e-9.
    """
    xm = np.asarray(x, dtype=float)
    if xm.ndim != 2:
        raise InputError(f"X must be a 2-d matrix, got ndim={xm.ndim}")
    if r < 1 or trials < 1:
        raise InputError(f"need r >= 1 and trials >= 1, got r={r}, trials={trials}")
    m, n = xm.shape
    if m + n < r:
        raise InputError(f"need m + n >= r for an orthonormal stack, got {m}+{n} < {r}")
    bound = math.sqrt(r) * float(np.linalg.norm(xm))
    rng = _rng(seed, 3)
    max_lhs = -np.inf
    witness = None
    passed = True
    for _ in range(trials):
        stack = rng.standard_normal((m + n, r))
        q, _ = np.linalg.qr(stack)
        v1, v2 = q[:m], q[m:]
        lhs = 2.0 * float(np.trace(v1.T @ xm @ v2))
        if lhs > max_lhs:
            max_lhs = lhs
            if lhs > bound + 1e-9:
                passed = False
                witness = (v1.copy(), v2.copy())
    return CrossCheckResult(passed=passed, trials=trials,
                            max_lhs=float(max_lhs), bound=bound,
                            witness=witness)
