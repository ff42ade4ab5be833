"""Pure-numpy greedy swap-search kernel (fallback for the compiled one).

Keep the semantics byte-aligned with ``rspca._greedy``: same swap rule, same
tie-breaks, same trajectory contents. ``rspca.kernels`` picks one at import.
"""

import numpy as np


def _refresh_basis(a, sup, r):
    """Top-r eigenbasis (descending, sign-fixed) of A[S, S] and its eigsum."""
    sub = a[np.ix_(sup, sup)]
    vals, vecs = np.linalg.eigh(sub)
    m_block = vecs[:, ::-1][:, :r].copy()
    for col in range(r):
        lead = int(np.argmax(np.abs(m_block[:, col])))
        if m_block[lead, col] < 0:
            m_block[:, col] = -m_block[:, col]
    return m_block, float(vals[::-1][:r].sum())


def greedy_run(a_half, a, diag_a, support0, r, max_iters, eps_improve):
    """One greedy run from ``support0``; see rspca.primal.greedy_search.

    Returns (support in slot order, basis block, trajectory, accepted swaps).
    """
    d = a_half.shape[0]
    sup = np.asarray(support0, dtype=np.int64).copy()
    k = sup.shape[0]
    in_s = np.zeros(d, dtype=bool)
    in_s[sup] = True
    trace_a = float(diag_a.sum())
    traj = np.empty(max_iters + 1)

    m_block, f_val = _refresh_basis(a, sup, r)
    traj[0] = trace_a - f_val
    iters = 0
    if k == d:
        return sup, m_block, traj[:1].copy(), 0

    for _ in range(max_iters):
        rows = a_half[sup]
        proj = m_block.T @ rows
        resid = float(diag_a[sup].sum() - (proj * proj).sum())

        ds = diag_a[sup]
        dmin = float(ds.min())
        j_out = int(sup[ds == dmin].min())
        slot = int(np.nonzero(sup == j_out)[0][0])
        delta_out = dmin - resid

        # rank-one residual update for every candidate j (see swap_scores)
        u = -(m_block @ m_block[slot])
        u[slot] += 1.0
        uu = float(u[slot])
        w = a_half @ (rows.T @ u)
        cand_resid = (resid + 2.0 * (w - w[j_out])
                      + uu * (diag_a - 2.0 * a[:, j_out] + diag_a[j_out]))
        delta_in = diag_a - cand_resid
        delta_in[in_s] = -np.inf
        j_in = int(np.argmax(delta_in))
        if not delta_in[j_in] > delta_out + eps_improve:
            break

        sup[slot] = j_in
        in_s[j_out] = False
        in_s[j_in] = True
        m_block, f_val = _refresh_basis(a, sup, r)
        iters += 1
        traj[iters] = trace_a - f_val

    return sup, m_block, traj[: iters + 1].copy(), iters
