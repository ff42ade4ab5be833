"""Branch-and-bound over breakpoint windows with LP outer approximation.

Each eta vector must end up supported on two adjacent breakpoints. Branching
restricts an eta to a contiguous index window; a node's relaxation is the
base LP plus all subgradient cuts collected so far (cuts are globally valid,
so one pool serves the whole tree). Any LP optimum upper-bounds its node, so
the search can stop at any time and report max(incumbents, open bounds);
that anytime value is what the time-limit contract promises.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from ..errors import NumericalError
from ..geometry import OrthonormalSparseFactor
from .model import CipModel, lift_factor
from .prep import pla_additive_term

VIOLATION_TOL = 1e-7
SOS_MASS_TOL = 1e-7
NODE_CUT_BUDGET = 200
PRUNE_REL_TOL = 1e-9
MONOTONE_REL_TOL = 1e-6


class CutPool:
    """Growing set of globally valid cut rows (index array, values, rhs)."""

    def __init__(self, n_vars: int):
        self.n_vars = n_vars
        self.rows: list[tuple[np.ndarray, np.ndarray, float]] = []
        self._matrix: sparse.csr_matrix | None = None
        self._built = 0

    def __len__(self) -> int:
        return len(self.rows)

    def add(self, rows) -> int:
        self.rows.extend(rows)
        return len(rows)

    def matrix(self) -> sparse.csr_matrix | None:
        if not self.rows:
            return None
        if self._matrix is None or self._built < len(self.rows):
            data, ri, ci = [], [], []
            for row, (idx, vals, _) in enumerate(self.rows):
                ri.extend([row] * len(idx))
                ci.extend(idx)
                data.extend(vals)
            self._matrix = sparse.csr_matrix(
                (data, (ri, ci)), shape=(len(self.rows), self.n_vars))
            self._built = len(self.rows)
        return self._matrix

    def rhs(self) -> np.ndarray:
        return np.asarray([r for (_, _, r) in self.rows])


@dataclass(frozen=True)
class NodeResult:
    """Outcome of one node relaxation solve."""

    status: str  # "solved" | "infeasible"
    value: float
    x: np.ndarray | None
    converged: bool
    cuts_added: int
    lp_solves: int


@dataclass(frozen=True)
class IncumbentRecord:
    """An SOS-feasible point found during the search (or the seeded start)."""

    value: float
    source: str  # "node" | "seed"
    xi_minus_gsq: np.ndarray = field(repr=False)
    envelope_caps: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class DualBoundReport:
    """Certified upper bound and search statistics."""

    upper_bound: float
    status: str  # "optimal" | "time-limit-anytime"
    nodes_explored: int
    cuts_added: int
    additive_term: float
    wallclock: float
    root_bound: float
    incumbent_value: float
    incumbents: tuple[IncumbentRecord, ...] = field(repr=False)
    lp_solves: int = 0
    monotone_violations: int = 0


def root_windows(model: CipModel) -> np.ndarray:
    width = 2 * model.prep.n_breakpoints + 1
    win = np.zeros((model.n_sos, 2), dtype=np.int64)
    win[:, 1] = width - 1
    return win


def _apply_windows(model: CipModel, windows: np.ndarray | None):
    lower = model.lower
    upper = model.upper
    if windows is None:
        return lower, upper
    upper = upper.copy()
    for sidx in range(model.n_sos):
        lo, hi = int(windows[sidx, 0]), int(windows[sidx, 1])
        sl = model.eta_slice(sidx)
        if lo > 0:
            upper[sl.start : sl.start + lo] = 0.0
        if sl.start + hi + 1 < sl.stop:
            upper[sl.start + hi + 1 : sl.stop] = 0.0
    return lower, upper


def _solve_lp(model: CipModel, pool: CutPool, lower, upper):
    a_ub = model.a_ub
    b_ub = model.b_ub
    extra = pool.matrix()
    if extra is not None:
        a_ub = sparse.vstack([a_ub, extra], format="csr")
        b_ub = np.concatenate([b_ub, pool.rhs()])
    res = linprog(-model.obj_coeffs, A_ub=a_ub, b_ub=b_ub,
                  A_eq=model.a_eq, b_eq=model.b_eq,
                  bounds=np.column_stack([lower, upper]),
                  method="highs")
    if res.status == 2:
        return None, -np.inf
    if res.status != 0:
        raise NumericalError(f"LP solve failed: status {res.status}: {res.message}")
    return res.x, float(-res.fun) + model.obj_const


def solve_node_relaxation(model: CipModel, windows: np.ndarray | None = None,
                          pool: CutPool | None = None,
                          cut_budget: int = NODE_CUT_BUDGET,
                          violation_tol: float = VIOLATION_TOL,
                          deadline: float | None = None) -> NodeResult:
    """Kelley loop: solve LP, cut violated convex constraints, repeat.

    Every intermediate LP value already upper-bounds the node (cuts only
    shrink the region), so stopping on budget or deadline is safe. Cuts are
    appended to ``pool`` and stay valid for the entire tree.
    """
    if pool is None:
        pool = CutPool(model.n_vars)
    lower, upper = _apply_windows(model, windows)
    budget = cut_budget
    lp_solves = 0
    added_total = 0
    while True:
        x, value = _solve_lp(model, pool, lower, upper)
        lp_solves += 1
        if x is None:
            return NodeResult("infeasible", -np.inf, None, True,
                              added_total, lp_solves)
        new_rows = []
        max_violation = 0.0
        for con in model.convex_constraints:
            v = con.violation(x)
            if v > violation_tol:
                max_violation = max(max_violation, v)
                new_rows.extend(con.cuts(x))
        converged = max_violation <= violation_tol
        out_of_time = deadline is not None and time.monotonic() >= deadline
        if converged or budget <= 0 or out_of_time:
            return NodeResult("solved", value, x, converged,
                              added_total, lp_solves)
        if len(new_rows) > budget:
            new_rows = new_rows[:budget]
        budget -= len(new_rows)
        added_total += pool.add(new_rows)


def _sos_spread_scores(model: CipModel, windows: np.ndarray,
                       x: np.ndarray) -> np.ndarray:
    """Per-SOS-set mass outside the best adjacent breakpoint pair."""
    scores = np.zeros(model.n_sos)
    for sidx in range(model.n_sos):
        lo, hi = int(windows[sidx, 0]), int(windows[sidx, 1])
        if hi - lo <= 1:
            continue
        seg = x[model.eta_slice(sidx)][lo : hi + 1]
        pair_best = float(np.max(seg[:-1] + seg[1:]))
        scores[sidx] = max(0.0, float(seg.sum()) - pair_best)
    return scores


def _split_window(model: CipModel, windows: np.ndarray, sidx: int,
                  x: np.ndarray | None) -> tuple[np.ndarray, np.ndarray]:
    lo, hi = int(windows[sidx, 0]), int(windows[sidx, 1])
    if x is not None:
        seg = x[model.eta_slice(sidx)][lo : hi + 1]
        total = float(seg.sum())
        cum = np.cumsum(seg)
        w = lo + int(np.searchsorted(cum, total / 2.0))
    else:
        w = (lo + hi) // 2
    w = min(max(w, lo + 1), hi - 1)
    left = windows.copy()
    left[sidx, 1] = w
    right = windows.copy()
    right[sidx, 0] = w
    return left, right


def branch_and_bound(model: CipModel, time_limit: float = 60.0,
                     warm_start_factor: OrthonormalSparseFactor | None = None,
                     node_cut_budget: int = NODE_CUT_BUDGET) -> DualBoundReport:
    """Best-bound-first search over breakpoint windows; valid at any time.

    ``warm_start_factor`` (a feasible point, e.g. from the primal search)
    seeds the incumbent value for pruning; its lifted coordinates satisfy
    every model constraint, so the seeded value never cuts off the true
    relaxation optimum.
    """
    t0 = time.monotonic()
    deadline = t0 + max(time_limit, 0.0)
    pool = CutPool(model.n_vars)
    additive = pla_additive_term(model.prep, model.r)

    incumbents: list[IncumbentRecord] = []
    incumbent_val = -np.inf
    if warm_start_factor is not None:
        x0 = lift_factor(model, warm_start_factor)
        incumbents.append(IncumbentRecord(
            value=model.objective_value(x0), source="seed",
            xi_minus_gsq=model.xi_minus_gsq(x0),
            envelope_caps=model.envelope_caps()))
        incumbent_val = incumbents[0].value

    nodes_explored = 0
    lp_solves = 0
    monotone_violations = 0
    closed_bound = -np.inf  # unresolved-but-terminal nodes keep their bound

    def prune_tol() -> float:
        return PRUNE_REL_TOL * max(1.0, abs(incumbent_val))

    # the root is always solved, even with a zero time budget, so the
    # report falls back to the root relaxation bound at worst
    windows0 = root_windows(model)
    root = solve_node_relaxation(model, windows0, pool, node_cut_budget,
                                 deadline=deadline)
    nodes_explored += 1
    lp_solves += root.lp_solves
    if root.status == "infeasible":
        raise NumericalError("root relaxation infeasible; model is broken")
    root_bound = root.value

    heap: list = []
    counter = 0

    def push(bound: float, windows: np.ndarray, x_hint) -> None:
        nonlocal counter
        heapq.heappush(heap, (-bound, counter, windows, x_hint))
        counter += 1

    def handle(result: NodeResult, windows: np.ndarray,
               inherited: float) -> None:
        """Close, record, or branch a solved node."""
        nonlocal incumbent_val, monotone_violations, closed_bound
        if result.status == "infeasible":
            return
        value = result.value
        if value > inherited + MONOTONE_REL_TOL * max(1.0, abs(inherited)):
            monotone_violations += 1
        value = min(value, inherited)
        if value <= incumbent_val + prune_tol():
            return
        scores = _sos_spread_scores(model, windows, result.x)
        if model.n_sos == 0 or float(scores.max(initial=0.0)) <= SOS_MASS_TOL:
            incumbents.append(IncumbentRecord(
                value=value, source="node",
                xi_minus_gsq=model.xi_minus_gsq(result.x),
                envelope_caps=model.envelope_caps()))
            incumbent_val = max(incumbent_val, value)
            return
        sidx = int(np.argmax(scores))
        left, right = _split_window(model, windows, sidx, result.x)
        push(value, left, None)
        push(value, right, None)

    handle(root, windows0, np.inf)

    status = "optimal"
    while heap:
        if time.monotonic() >= deadline:
            status = "time-limit-anytime"
            break
        neg_bound, _, windows, _ = heapq.heappop(heap)
        inherited = -neg_bound
        if inherited <= incumbent_val + prune_tol():
            continue
        try:
            result = solve_node_relaxation(model, windows, pool,
                                           node_cut_budget, deadline=deadline)
            nodes_explored += 1
            lp_solves += result.lp_solves
        except NumericalError:
            # unresolved: keep the inherited bound, split blindly if possible
            wide = windows[:, 1] - windows[:, 0]
            if wide.size and int(wide.max()) > 1:
                sidx = int(np.argmax(wide))
                left, right = _split_window(model, windows, sidx, None)
                push(inherited, left, None)
                push(inherited, right, None)
            else:
                closed_bound = max(closed_bound, inherited)
            continue
        handle(result, windows, inherited)

    open_bounds = [-item[0] for item in heap]
    upper = max([incumbent_val, closed_bound, *open_bounds])
    if not np.isfinite(upper):
        upper = root_bound
    return DualBoundReport(
        upper_bound=float(upper), status=status,
        nodes_explored=nodes_explored, cuts_added=len(pool),
        additive_term=float(additive), wallclock=time.monotonic() - t0,
        root_bound=float(root_bound), incumbent_value=float(incumbent_val),
        incumbents=tuple(incumbents), lp_solves=lp_solves,
        monotone_violations=monotone_violations)
