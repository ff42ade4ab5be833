# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loop of the greedy support-swap search.

Same contract as ``rspca._greedy_py.greedy_run``; selected by
``rspca.kernels`` when the extension built. The whole iteration runs without
the GIL, so multistart threads scale.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, fabs
from scipy.linalg.cython_lapack cimport dsyev

cnp.import_array()


cdef int _refresh_basis(const double[:, ::1] a, cnp.int64_t[::1] sup,
                        double[:, ::1] buf, double[::1] evals,
                        double[::1] work, int lwork,
                        double[:, ::1] m_block, double* f_val,
                        int k, int r) noexcept nogil:
    """Top-r eigenbasis of A[S, S] into m_block (descending, sign-fixed)."""
    cdef int t, q, col, src, lead
    cdef double mx, sign
    cdef char jobz = b'V'
    cdef char uplo = b'L'
    cdef int info = 0
    cdef int kk = k
    for t in range(k):
        for q in range(k):
            buf[t, q] = a[sup[t], sup[q]]
    dsyev(&jobz, &uplo, &kk, &buf[0, 0], &kk, &evals[0], &work[0], &lwork, &info)
    if info != 0:
        return info
    # eigenvector for evals[q] (ascending) sits in Fortran column q of the
    # work buffer, i.e. row q of this C-ordered view
    f_val[0] = 0.0
    for col in range(r):
        src = k - 1 - col
        f_val[0] += evals[src]
        lead = 0
        mx = fabs(buf[src, 0])
        for t in range(1, k):
            if fabs(buf[src, t]) > mx:
                mx = fabs(buf[src, t])
                lead = t
        sign = 1.0 if buf[src, lead] >= 0.0 else -1.0
        for t in range(k):
            m_block[t, col] = sign * buf[src, t]
    return 0


def greedy_run(const double[:, ::1] a_half, const double[:, ::1] a,
               const double[::1] diag_a,
               support0, int r, int max_iters, double eps_improve):
    """One greedy run from ``support0``; see rspca.primal.greedy_search.

    Returns (support in slot order, basis block, trajectory, accepted swaps).
    """
    cdef int d = a_half.shape[0]
    sup_arr = np.array(support0, dtype=np.int64)
    cdef cnp.int64_t[::1] sup = sup_arr
    cdef int k = sup.shape[0]

    in_s_arr = np.zeros(d, dtype=np.uint8)
    cdef cnp.uint8_t[::1] in_s = in_s_arr
    buf_arr = np.empty((k, k))
    cdef double[:, ::1] buf = buf_arr
    evals_arr = np.empty(k)
    cdef double[::1] evals = evals_arr
    m_arr = np.empty((k, r))
    cdef double[:, ::1] m_block = m_arr
    u_arr = np.empty(k)
    cdef double[::1] u = u_arr
    c_arr = np.empty(d)
    cdef double[::1] c = c_arr
    w_arr = np.empty(d)
    cdef double[::1] w = w_arr
    traj_arr = np.empty(max_iters + 1)
    cdef double[::1] traj = traj_arr

    # LAPACK workspace query
    cdef char jobz = b'V'
    cdef char uplo = b'L'
    cdef int kk = k
    cdef int info = 0
    cdef int lwork = -1
    cdef double wq = 0.0
    dsyev(&jobz, &uplo, &kk, &buf[0, 0], &kk, &evals[0], &wq, &lwork, &info)
    lwork = max(int(wq), 3 * k)
    work_arr = np.empty(lwork)
    cdef double[::1] work = work_arr

    cdef int t, q, j, iters, slot, j_out, j_in
    cdef double trace_a, f_val, resid, psum, acc, dmin, delta_out
    cdef double uu, w_old, d_old, cand_resid, din, best_in
    cdef int fail = 0

    trace_a = 0.0
    for j in range(d):
        trace_a += diag_a[j]
    for t in range(k):
        in_s[sup[t]] = 1

    fail = _refresh_basis(a, sup, buf, evals, work, lwork, m_block, &f_val, k, r)
    if fail != 0:
        raise RuntimeError(f"dsyev failed with info={fail}")
    traj[0] = trace_a - f_val
    iters = 0
    if k == d:
        return sup_arr, m_arr, traj_arr[:1].copy(), 0

    with nogil:
        while iters < max_iters:
            # projection residual R = sum_{j in S} diag_a[j] - ||M^T B||_F^2
            psum = 0.0
            for q in range(r):
                for j in range(d):
                    acc = 0.0
                    for t in range(k):
                        acc += m_block[t, q] * a_half[sup[t], j]
                    psum += acc * acc
            resid = -psum
            for t in range(k):
                resid += diag_a[sup[t]]

            # worst row out: smallest diagonal, smallest index on ties
            j_out = -1
            slot = -1
            dmin = INFINITY
            for t in range(k):
                j = sup[t]
                if diag_a[j] < dmin or (diag_a[j] == dmin and j < j_out):
                    dmin = diag_a[j]
                    j_out = j
                    slot = t
            delta_out = dmin - resid

            # u = (I - M M^T) e_slot;  ||u||^2 = u[slot]
            for t in range(k):
                acc = 0.0
                for q in range(r):
                    acc += m_block[t, q] * m_block[slot, q]
                u[t] = -acc
            u[slot] += 1.0
            uu = u[slot]

            # c = B^T u, w = A^{1/2} c
            for j in range(d):
                acc = 0.0
                for t in range(k):
                    acc += u[t] * a_half[sup[t], j]
                c[j] = acc
            for j in range(d):
                acc = 0.0
                for q in range(d):
                    acc += a_half[j, q] * c[q]
                w[j] = acc

            # best row in: rank-one residual update per candidate
            w_old = w[j_out]
            d_old = diag_a[j_out]
            best_in = -INFINITY
            j_in = -1
            for j in range(d):
                if in_s[j]:
                    continue
                cand_resid = (resid + 2.0 * (w[j] - w_old)
                              + uu * (diag_a[j] - 2.0 * a[j, j_out] + d_old))
                din = diag_a[j] - cand_resid
                if din > best_in:
                    best_in = din
                    j_in = j
            if j_in < 0 or best_in <= delta_out + eps_improve:
                break

            sup[slot] = j_in
            in_s[j_out] = 0
            in_s[j_in] = 1
            fail = _refresh_basis(a, sup, buf, evals, work, lwork,
                                  m_block, &f_val, k, r)
            if fail != 0:
                break
            iters += 1
            traj[iters] = trace_a - f_val

    if fail != 0:
        raise RuntimeError(f"dsyev failed with info={fail}")
    return sup_arr, m_arr, traj_arr[: iters + 1].copy(), iters
