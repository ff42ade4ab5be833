"""LP/convex model behind the certified upper bound.

Variables (one flat vector x):
  V (d*r)    factor entries, box [-1, 1]
  g (d*r)    projections g_ji = a_j^T v_i, box [-theta_j, theta_j]
  w (d*r)    |V| splits for the column l1 budget
  rho (d)    row-norm epigraph values, sum bounded by sqrt(r*k)
  xi (p*r)   chordal overestimates of g^2 for the head rows (j in jplus)
  eta (p*r*(2N+1))  breakpoint weights: g = sum gamma*eta, xi = sum gamma^2*eta
  s          aggregate for the tail rows (j in jminus)
  t          aggregate for sum of all g^2 (bounded by r)

Objective (max): sum_{j in jplus} (lambda_j - lambda_th) * sum_i xi_ji - s,
plus the constant r*lambda_th.

Linear rows are built once; quadratic/conic families are registered as
separators that emit subgradient cuts on demand (Kelley loop in the solver).
Every feasible factor lifts to a feasible x, so any LP relaxation value is a
valid upper bound; this holds also for sub-orthonormal factors (V^T V <= I),
which the sub-matrix decomposition relies on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from ..errors import InputError
from ..geometry import OrthonormalSparseFactor
from ..linalg import _as_entries
from .prep import SpectralPrep, baseline1


@dataclass(frozen=True)
class QuadraticCap:
    """Convex constraint ||E x||^2 + f.x <= cap, cut by subgradients."""

    name: str
    emat: sparse.csr_matrix = field(repr=False)
    cap: float
    lin_idx: int | None = None  # index of a single -1.0 linear term, if any

    def violation(self, x: np.ndarray) -> float:
        val = float(np.sum((self.emat @ x) ** 2)) - self.cap
        if self.lin_idx is not None:
            val -= x[self.lin_idx]
        return val

    def cuts(self, x: np.ndarray) -> list[tuple[np.ndarray, np.ndarray, float]]:
        ex = self.emat @ x
        grad = 2.0 * (self.emat.T @ ex)
        idx = np.nonzero(grad)[0]
        vals = grad[idx]
        if self.lin_idx is not None:
            idx = np.append(idx, self.lin_idx)
            vals = np.append(vals, -1.0)
        rhs = self.cap + float(np.sum(ex**2))
        return [(idx.astype(np.int64), vals, rhs)]


@dataclass(frozen=True)
class RowNormSum:
    """sum_m ||V_m||_2 <= budget via epigraph rows rho_m >= ||V_m||_2.

    The base LP carries sum rho <= budget; when the true row-norm sum exceeds
    the budget at an LP point, member cuts <u_m, V_m> <= rho_m are added for
    the rows whose norm escapes its epigraph value.
    """

    name: str
    off_v: int
    off_rho: int
    d: int
    r: int
    budget: float

    def _rows(self, x: np.ndarray) -> np.ndarray:
        return x[self.off_v : self.off_v + self.d * self.r].reshape(self.d, self.r)

    def violation(self, x: np.ndarray) -> float:
        return float(np.sum(np.linalg.norm(self._rows(x), axis=1)) - self.budget)

    def cuts(self, x: np.ndarray) -> list[tuple[np.ndarray, np.ndarray, float]]:
        v = self._rows(x)
        norms = np.linalg.norm(v, axis=1)
        rho = x[self.off_rho : self.off_rho + self.d]
        out = []
        for m in np.nonzero(norms > rho + 1e-10)[0]:
            u = v[m] / norms[m]
            idx = np.arange(self.off_v + m * self.r,
                            self.off_v + (m + 1) * self.r, dtype=np.int64)
            idx = np.append(idx, self.off_rho + m)
            vals = np.append(u, -1.0)
            out.append((idx, vals, 0.0))
        return out


@dataclass(frozen=True)
class CipModel:
    """Assembled model: linear base plus registered convex separators."""

    d: int
    r: int
    k: int
    prep: SpectralPrep
    baseline1_value: float
    n_vars: int
    off_v: int
    off_g: int
    off_w: int
    off_rho: int
    off_xi: int
    off_eta: int
    off_s: int
    off_t: int
    obj_coeffs: np.ndarray = field(repr=False)
    obj_const: float
    a_eq: sparse.csr_matrix = field(repr=False)
    b_eq: np.ndarray = field(repr=False)
    a_ub: sparse.csr_matrix = field(repr=False)
    b_ub: np.ndarray = field(repr=False)
    lower: np.ndarray = field(repr=False)
    upper: np.ndarray = field(repr=False)
    convex_constraints: tuple = field(repr=False)
    n_sos: int

    # --- variable indexing -------------------------------------------------

    def v_index(self, m: int, i: int) -> int:
        return self.off_v + m * self.r + i

    def g_index(self, j: int, i: int) -> int:
        return self.off_g + j * self.r + i

    def xi_index(self, head_pos: int, i: int) -> int:
        return self.off_xi + head_pos * self.r + i

    def eta_slice(self, sos_index: int) -> slice:
        width = 2 * self.prep.n_breakpoints + 1
        start = self.off_eta + sos_index * width
        return slice(start, start + width)

    def sos_head_pos(self, sos_index: int) -> tuple[int, int]:
        return divmod(sos_index, self.r)

    # --- evaluation helpers -------------------------------------------------

    def objective_value(self, x: np.ndarray) -> float:
        return float(self.obj_coeffs @ x) + self.obj_const

    def xi_minus_gsq(self, x: np.ndarray) -> np.ndarray:
        """Per-(head row, column) overestimation xi - g^2 at the point x."""
        p = len(self.prep.jplus)
        out = np.empty((p, self.r))
        for pos, j in enumerate(self.prep.jplus):
            for i in range(self.r):
                g = x[self.g_index(j, i)]
                out[pos, i] = x[self.xi_index(pos, i)] - g * g
        return out

    def envelope_caps(self) -> np.ndarray:
        """Per-head-row chordal gap bound theta_j^2 / (4 N^2)."""
        th = self.prep.theta[list(self.prep.jplus)]
        return th**2 / (4.0 * self.prep.n_breakpoints**2)


def build_cip_model(prep: SpectralPrep, mat, k: int, r: int) -> CipModel:
    """Assemble the LP base and convex separators for (A, k, r)."""
    a = _as_entries(mat)
    d = a.shape[0]
    if prep.eig.dim != d:
        raise InputError(f"prep dimension {prep.eig.dim} != matrix dimension {d}")
    if prep.k != k:
        raise InputError(f"prep was built for k={prep.k}, asked for k={k}")
    if not 1 <= r <= k <= d:
        raise InputError(f"need 1 <= r <= k <= d, got r={r}, k={k}, d={d}")

    n_half = prep.n_breakpoints
    width = 2 * n_half + 1
    jplus = list(prep.jplus)
    p = len(jplus)
    lam = prep.eig.eigenvalues
    lam_th = prep.lambda_th
    theta = prep.theta
    u_basis = prep.eig.eigenvectors

    off_v = 0
    off_g = off_v + d * r
    off_w = off_g + d * r
    off_rho = off_w + d * r
    off_xi = off_rho + d
    off_eta = off_xi + p * r
    off_s = off_eta + p * r * width
    off_t = off_s + 1
    n = off_t + 1

    def vi(m, i):
        return off_v + m * r + i

    def gi(j, i):
        return off_g + j * r + i

    def wi(m, i):
        return off_w + m * r + i

    def xii(pos, i):
        return off_xi + pos * r + i

    def etai(pos, i, ell):
        return off_eta + (pos * r + i) * width + ell

    # ----- objective (stored for maximization) -----
    c = np.zeros(n)
    for pos, j in enumerate(jplus):
        for i in range(r):
            c[xii(pos, i)] = lam[j] - lam_th
    c[off_s] = -1.0
    obj_const = r * lam_th

    # ----- equality rows -----
    rows, cols, vals, rhs_eq = [], [], [], []

    def add_eq(col_idx, col_val, b):
        row = len(rhs_eq)
        rows.extend([row] * len(col_idx))
        cols.extend(col_idx)
        vals.extend(col_val)
        rhs_eq.append(b)

    for j in range(d):
        for i in range(r):
            idx = [vi(m, i) for m in range(d)] + [gi(j, i)]
            val = list(u_basis[:, j]) + [-1.0]
            add_eq(idx, val, 0.0)
    for pos, j in enumerate(jplus):
        grid = prep.gamma[j]
        for i in range(r):
            eta_idx = [etai(pos, i, ell) for ell in range(width)]
            add_eq(eta_idx + [gi(j, i)], list(grid) + [-1.0], 0.0)
            add_eq(eta_idx + [xii(pos, i)], list(grid**2) + [-1.0], 0.0)
            add_eq(eta_idx, [1.0] * width, 1.0)

    a_eq = sparse.csr_matrix(
        (vals, (rows, cols)), shape=(len(rhs_eq), n))
    b_eq = np.asarray(rhs_eq)

    # ----- inequality rows -----
    rows, cols, vals, rhs_ub = [], [], [], []

    def add_ub(col_idx, col_val, b):
        row = len(rhs_ub)
        rows.extend([row] * len(col_idx))
        cols.extend(col_idx)
        vals.extend(col_val)
        rhs_ub.append(b)

    for m in range(d):
        for i in range(r):
            add_ub([vi(m, i), wi(m, i)], [1.0, -1.0], 0.0)
            add_ub([vi(m, i), wi(m, i)], [-1.0, -1.0], 0.0)
    for i in range(r):
        add_ub([wi(m, i) for m in range(d)], [1.0] * d, math.sqrt(k))
    add_ub([off_rho + m for m in range(d)], [1.0] * d, math.sqrt(r * k))
    for pos, j in enumerate(jplus):
        add_ub([xii(pos, i) for i in range(r)], [1.0] * r,
               theta[j]**2 * (1.0 + r / (4.0 * n_half**2)))

    # negative round-off eigenvalues: weights are clamped at zero and the
    # diagonal-cut right-hand sides carry the matching rigorous slack
    neg_slack = r * max(0.0, -float(lam[-1]))
    b1 = baseline1(a, k)
    cut_xi_rhs = (b1 + neg_slack
                  + sum(r * (lam[j] - lam_th) * theta[j]**2 / (4.0 * n_half**2)
                        for j in jplus))
    idx = [xii(pos, i) for pos, _ in enumerate(jplus) for i in range(r)]
    val = [lam[j] - lam_th for j in jplus for _ in range(r)]
    add_ub(idx + [off_s, off_t], val + [-1.0, lam_th], cut_xi_rhs)

    a_ub = sparse.csr_matrix(
        (vals, (rows, cols)), shape=(len(rhs_ub), n))
    b_ub = np.asarray(rhs_ub)

    # ----- bounds -----
    lower = np.zeros(n)
    upper = np.full(n, np.inf)
    lower[off_v : off_v + d * r] = -1.0
    upper[off_v : off_v + d * r] = 1.0
    for j in range(d):
        for i in range(r):
            lower[gi(j, i)] = -theta[j]
            upper[gi(j, i)] = theta[j]
    upper[off_w : off_w + d * r] = 1.0
    upper[off_rho : off_rho + d] = 1.0  # rows of an operator-norm-1 factor
    for pos, j in enumerate(jplus):
        upper[off_xi + pos * r : off_xi + (pos + 1) * r] = theta[j]**2
    upper[off_eta : off_eta + p * r * width] = 1.0
    upper[off_t] = float(r)

    # ----- convex separators -----
    constraints = []
    for i in range(r):
        emat = sparse.csr_matrix(
            (np.ones(d), (np.arange(d), [vi(m, i) for m in range(d)])),
            shape=(d, n))
        constraints.append(QuadraticCap(f"column-sqnorm[{i}]", emat, 1.0))
    for i1 in range(r):
        for i2 in range(i1 + 1, r):
            for sign, tag in ((1.0, "+"), (-1.0, "-")):
                er = np.repeat(np.arange(d), 2)
                ec = np.array([[vi(m, i1), vi(m, i2)] for m in range(d)]).ravel()
                ev = np.tile([1.0, sign], d)
                emat = sparse.csr_matrix((ev, (er, ec)), shape=(d, n))
                constraints.append(
                    QuadraticCap(f"pair-norm[{i1}{tag}{i2}]", emat, 2.0))
    constraints.append(RowNormSum("row-norm-sum", off_v, off_rho, d, r,
                                  math.sqrt(r * k)))
    for j in range(d):
        emat = sparse.csr_matrix(
            (np.ones(r), (np.arange(r), [gi(j, i) for i in range(r)])),
            shape=(r, n))
        constraints.append(QuadraticCap(f"sparse-g[{j}]", emat, theta[j]**2))
    jminus = list(prep.jminus)
    if jminus:
        weights = np.sqrt(np.maximum(lam_th - lam[jminus], 0.0))
        er = np.arange(len(jminus) * r)
        ec = np.array([gi(j, i) for j in jminus for i in range(r)])
        ev = np.repeat(weights, r)
        emat = sparse.csr_matrix((ev, (er, ec)), shape=(len(er), n))
        constraints.append(QuadraticCap("tail-aggregate", emat, 0.0,
                                        lin_idx=off_s))
    er = np.arange(d * r)
    ec = np.array([gi(j, i) for j in range(d) for i in range(r)])
    emat = sparse.csr_matrix((np.ones(d * r), (er, ec)), shape=(d * r, n))
    constraints.append(QuadraticCap("total-gsq", emat, 0.0, lin_idx=off_t))
    pos_w = np.sqrt(np.maximum(lam, 0.0))
    keep = np.nonzero(pos_w)[0]
    if keep.size:
        er = np.arange(keep.size * r)
        ec = np.array([gi(j, i) for j in keep for i in range(r)])
        ev = np.repeat(pos_w[keep], r)
        emat = sparse.csr_matrix((ev, (er, ec)), shape=(len(er), n))
        constraints.append(QuadraticCap("diagonal-cut", emat, b1 + neg_slack))

    return CipModel(
        d=d, r=r, k=k, prep=prep, baseline1_value=b1, n_vars=n,
        off_v=off_v, off_g=off_g, off_w=off_w, off_rho=off_rho,
        off_xi=off_xi, off_eta=off_eta, off_s=off_s, off_t=off_t,
        obj_coeffs=c, obj_const=float(obj_const),
        a_eq=a_eq, b_eq=b_eq, a_ub=a_ub, b_ub=b_ub,
        lower=lower, upper=upper,
        convex_constraints=tuple(constraints), n_sos=p * r)


def lift_factor(model: CipModel, factor: OrthonormalSparseFactor) -> np.ndarray:
    """Embed a feasible factor into model variables (a feasible point).

    Used to seed the search with an incumbent value and to sanity-check cut
    validity at known feasible points.
    """
    prep = model.prep
    d, r = model.d, model.r
    if factor.d != d or factor.r != r or factor.k > model.k:
        raise InputError(
            f"factor shape (d={factor.d}, r={factor.r}, k={factor.k}) does not "
            f"match model (d={d}, r={r}, k={model.k})")
    n_half = prep.n_breakpoints
    width = 2 * n_half + 1
    x = np.zeros(model.n_vars)

    v = factor.embed()
    g = prep.eig.eigenvectors.T @ v
    g = np.clip(g, -prep.theta[:, None], prep.theta[:, None])
    x[model.off_v : model.off_v + d * r] = v.ravel()
    x[model.off_g : model.off_g + d * r] = g.ravel()
    x[model.off_w : model.off_w + d * r] = np.abs(v).ravel()
    x[model.off_rho : model.off_rho + d] = np.linalg.norm(v, axis=1)

    for pos, j in enumerate(prep.jplus):
        grid = prep.gamma[j]
        for i in range(r):
            # place g on the grid with the two enclosing breakpoints
            t = g[j, i] / prep.theta[j] * n_half + n_half
            lo = int(min(max(math.floor(t), 0), width - 2))
            frac = min(max(t - lo, 0.0), 1.0)
            sl = model.eta_slice(pos * r + i)
            x[sl.start + lo] = 1.0 - frac
            x[sl.start + lo + 1] = frac
            x[model.xi_index(pos, i)] = ((1.0 - frac) * grid[lo]**2
                                         + frac * grid[lo + 1]**2)

    lam = prep.eig.eigenvalues
    jminus = list(prep.jminus)
    if jminus:
        coef = np.maximum(prep.lambda_th - lam[jminus], 0.0)
        x[model.off_s] = float(coef @ np.sum(g[jminus] ** 2, axis=1))
    x[model.off_t] = min(float(np.sum(g**2)), float(r))
    return x
