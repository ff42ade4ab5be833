"""Lower bounds: exact support objective, proxy objective, greedy swap search.

The search keeps a support S of size k and the top-r eigenbasis M of A[S, S],
scores every single-row swap through a proxy of the reconstruction error

    fbar(S, M) = ||(A^{1/2})_S - M M^T (A^{1/2})_S||_F^2 + ||(A^{1/2})_{S^C}||_F^2,

and accepts the best swap while it strictly improves the proxy with M held
fixed. Re-optimizing M after the swap can only help, so fbar decreases
strictly along the trajectory. The score scan runs through a rank-one update
of the projection residual, O(d^2) per iteration; the hot loop lives in
``rspca.kernels`` (compiled when available).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InputError
from .geometry import OrthonormalSparseFactor
from .instances import _rng
from .linalg import _as_entries, _fix_signs, psd_sqrt

# an accepted swap must beat the outgoing score by this times Tr(A)
IMPROVE_REL = 1e-12


@dataclass(frozen=True)
class PrimalSolution:
    """A feasible point and the search record that produced it.

    ``trajectory`` holds the proxy objective after the initial basis and after
    each accepted swap; it is strictly decreasing.
    """

    support: tuple[int, ...]
    factor: OrthonormalSparseFactor
    objective: float
    iterations: int
    trajectory: tuple[float, ...]


@dataclass(frozen=True)
class SwapScores:
    """Swap scores for one search state (support S, fixed basis M).

    ``delta_out[j]``, j in S, is the row norm of row j of A^(1/2) minus the
    projection residual of the whole block (the residual term is shared by
    all j). ``delta_in[j]``, j outside S, scores placing row j in
    ``j_out``'s slot with M unchanged. The swap (j_out -> j_in) improves the
    proxy objective by exactly ``delta_in[j_in] - delta_out[j_out]``.
    """

    residual: float
    delta_out: dict[int, float]
    delta_in: dict[int, float]
    j_out: int
    j_in: int | None


def _check_support(s, d: int) -> list[int]:
    idx = [int(j) for j in s]
    if len(set(idx)) != len(idx):
        raise InputError("support contains duplicates")
    if idx and (min(idx) < 0 or max(idx) >= d):
        raise InputError(f"support indices out of range [0, {d - 1}]")
    return idx


def _support_eigenbasis(a: np.ndarray, sup: list[int], r: int):
    sub = a[np.ix_(sup, sup)]
    vals, vecs = np.linalg.eigh(sub)
    block = _fix_signs(vecs[:, ::-1][:, :r])
    return float(vals[::-1][:r].sum()), block


def exact_support_objective(mat, s, r: int) -> tuple[float, OrthonormalSparseFactor]:
    """Best objective on a fixed support: sum of top-r eigenvalues of A[S, S].

    Returns the value and the optimal factor (top-r eigenvectors of the
    principal block, embedded on the sorted support).
    """
    a = _as_entries(mat)
    sup = sorted(_check_support(s, a.shape[0]))
    if r < 1 or len(sup) < r:
        raise InputError(f"need 1 <= r <= |S|, got r={r}, |S|={len(sup)}")
    value, block = _support_eigenbasis(a, sup, r)
    factor = OrthonormalSparseFactor(d=a.shape[0], r=r, k=len(sup),
                                     support=tuple(sup), block=block)
    return value, factor


def _check_basis(m_block: np.ndarray, n_rows: int) -> np.ndarray:
    m = np.asarray(m_block, dtype=float)
    if m.ndim != 2 or m.shape[0] != n_rows:
        raise InputError(
            f"basis must have {n_rows} rows, got shape {m.shape}")
    gram = m.T @ m
    err = float(np.linalg.norm(gram - np.eye(m.shape[1])))
    if err > 1e-9:
        raise InputError(f"basis columns not orthonormal: ||M^T M - I|| = {err:.3e}")
    return m


def proxy_objective(a_half, s, m_block) -> float:
    """The reconstruction-error proxy fbar(S, M), evaluated literally."""
    ah = _as_entries(a_half)
    sup = _check_support(s, ah.shape[0])
    m = _check_basis(m_block, len(sup))
    rows = ah[sup]
    resid = rows - m @ (m.T @ rows)
    mask = np.ones(ah.shape[0], dtype=bool)
    mask[sup] = False
    rest = ah[mask]
    return float((resid * resid).sum() + (rest * rest).sum())


def swap_scores(a_half, s, m_block) -> SwapScores:
    """Score all single-row swaps for the state (S, M).

    Candidate scores come from a rank-one update of the projection residual:
    with Q = I - M M^T, u = Q e_slot and c = (Q B)^T u, replacing the slot row
    a_old by a_j changes ||Q B||_F^2 by 2 c^T (a_j - a_old) + ||u||^2 ||a_j - a_old||^2.
    """
    ah = _as_entries(a_half)
    sup = _check_support(s, ah.shape[0])
    if not sup:
        raise InputError("support must be nonempty")
    m = _check_basis(m_block, len(sup))
    d = ah.shape[0]
    sup_arr = np.asarray(sup, dtype=int)

    diag_a = np.einsum("ij,ij->i", ah, ah)
    rows = ah[sup_arr]
    proj = m.T @ rows
    resid = float(diag_a[sup_arr].sum() - (proj * proj).sum())

    delta_out = {int(j): float(diag_a[j] - resid) for j in sup_arr}
    ds = diag_a[sup_arr]
    j_out = int(sup_arr[ds == ds.min()].min())
    slot = int(np.nonzero(sup_arr == j_out)[0][0])

    if len(sup) == d:
        return SwapScores(resid, delta_out, {}, j_out, None)

    u = -(m @ m[slot])
    u[slot] += 1.0
    uu = float(u[slot])
    w = ah @ (rows.T @ u)
    a_col = ah @ ah[:, j_out]
    cand_resid = (resid + 2.0 * (w - w[j_out])
                  + uu * (diag_a - 2.0 * a_col + diag_a[j_out]))
    scores = diag_a - cand_resid

    in_s = np.zeros(d, dtype=bool)
    in_s[sup_arr] = True
    delta_in = {int(j): float(scores[j]) for j in range(d) if not in_s[j]}
    out_scores = np.where(in_s, -np.inf, scores)
    j_in = int(np.argmax(out_scores))
    return SwapScores(resid, delta_out, delta_in, j_out, j_in)


def greedy_search(mat, k: int, r: int, s0, max_iters: int | None = None,
                  a_half: np.ndarray | None = None) -> PrimalSolution:
    """Greedy neighborhood search from the start support ``s0``.

    Swaps one row at a time (worst row out by row norm, best row in by the
    rank-one proxy score) while the proxy objective strictly improves;
    the top-r eigenbasis is recomputed after every accepted swap. Runs at
    most ``max_iters`` swaps (default: d).
    """
    a = _as_entries(mat)
    d = a.shape[0]
    if not 1 <= r <= k <= d:
        raise InputError(f"need 1 <= r <= k <= d, got r={r}, k={k}, d={d}")
    sup0 = _check_support(s0, d)
    if len(sup0) != k:
        raise InputError(f"|S0| = {len(sup0)} != k = {k}")
    if max_iters is None:
        max_iters = d
    if max_iters < 1:
        raise InputError(f"max_iters must be >= 1, got {max_iters}")
    if a_half is None:
        a_half = psd_sqrt(a)

    diag_a = np.ascontiguousarray(np.diagonal(a))
    eps = IMPROVE_REL * float(diag_a.sum())
    sup, _, traj, iters = kernels.greedy_run(
        np.ascontiguousarray(a_half), np.ascontiguousarray(a), diag_a,
        np.asarray(sup0, dtype=np.int64), r, int(max_iters), eps)

    support = tuple(sorted(int(j) for j in sup))
    value, block = _support_eigenbasis(a, list(support), r)
    factor = OrthonormalSparseFactor(d=d, r=r, k=k, support=support, block=block)
    return PrimalSolution(support=support, factor=factor, objective=value,
                          iterations=int(iters),
                          trajectory=tuple(float(v) for v in traj))


def resolve_threads(threads: int | None = None) -> int:
    """Worker count: explicit argument, else RSPCA_THREADS, else auto (0)."""
    if threads is None:
        raw = os.environ.get("RSPCA_THREADS", "0")
        try:
            threads = int(raw)
        except ValueError:
            raise InputError(f"RSPCA_THREADS must be an integer, got {raw!r}")
    if threads < 0:
        raise InputError(f"thread count must be >= 0, got {threads}")
    if threads == 0:
        threads = os.cpu_count() or 1
    return threads


def multistart(mat, k: int, r: int, restarts: int = 400, seed: int = 0,
               max_iters: int | None = None,
               threads: int | None = None) -> PrimalSolution:
    """Best greedy_search result over uniformly random start supports.

    Deterministic for a fixed seed: restart sub-seeds are split from ``seed``
    and results are reduced in restart order (max objective, ties toward the
    lexicographically smallest support), independent of the worker count.
    """
    a = _as_entries(mat)
    d = a.shape[0]
    if restarts < 1:
        raise InputError(f"restarts must be >= 1, got {restarts}")
    if not 1 <= r <= k <= d:
        raise InputError(f"need 1 <= r <= k <= d, got r={r}, k={k}, d={d}")
    a_half = psd_sqrt(a)

    def one(i: int) -> PrimalSolution:
        rng = _rng(seed, 2, i)
        s0 = np.sort(rng.choice(d, size=k, replace=False))
        return greedy_search(a, k, r, s0, max_iters=max_iters, a_half=a_half)

    workers = min(resolve_threads(threads), restarts)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, range(restarts)))
    else:
        results = [one(i) for i in range(restarts)]

    best = results[0]
    for sol in results[1:]:
        if sol.objective > best.objective or (
                sol.objective == best.objective and sol.support < best.support):
            best = sol
    return best
