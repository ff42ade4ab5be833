"""Exhaustive ground truth for tiny instances.

``brute_force_opt`` enumerates every k-subset, so it is the provenance for
expected optima in tests; a guard refuses enumerations past 10^6 subsets.
"""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np

from .errors import GuardError, InputError
from .linalg import _as_entries

ENUMERATION_GUARD = 10**6


def brute_force_opt(mat, k: int, r: int,
                    guard: int = ENUMERATION_GUARD) -> tuple[float, tuple[int, ...]]:
    """Exact optimum over all k-subsets: (value, lexicographically least argmax)."""
    a = _as_entries(mat)
    d = a.shape[0]
    if not 1 <= r <= k <= d:
        raise InputError(f"need 1 <= r <= k <= d, got r={r}, k={k}, d={d}")
    count = math.comb(d, k)
    if count > guard:
        raise GuardError(
            f"enumeration of C({d},{k}) = {count} subsets exceeds guard {guard}",
            count=count)
    best_val = -np.inf
    best_sup: tuple[int, ...] | None = None
    for sup in combinations(range(d), k):
        sub = a[np.ix_(sup, sup)]
        val = float(np.linalg.eigvalsh(sub)[-r:].sum())
        # lexicographic enumeration + strict improvement = smallest tie winner
        if val > best_val:
            best_val = val
            best_sup = sup
    assert best_sup is not None
    return best_val, best_sup


def local_search_exact_neighborhood(mat, k: int, r: int, s0) -> tuple[int, ...]:
    """Exact 1-swap descent: move to the best support sharing k-1 indices.

    Repeats until no strict improvement. Exhaustive within each step, so this
    is a reference point for the cheaper proxy-guided search, not a
    production path.
    """
    a = _as_entries(mat)
    d = a.shape[0]
    if not 1 <= r <= k <= d:
        raise InputError(f"need 1 <= r <= k <= d, got r={r}, k={k}, d={d}")
    sup = sorted(int(j) for j in s0)
    if len(set(sup)) != k:
        raise InputError(f"|S0| = {len(set(sup))} != k = {k}")
    if sup[0] < 0 or sup[-1] >= d:
        raise InputError(f"support indices out of range [0, {d - 1}]")

    def value(s: tuple[int, ...]) -> float:
        return float(np.linalg.eigvalsh(a[np.ix_(s, s)])[-r:].sum())

    current = tuple(sup)
    current_val = value(current)
    while True:
        best_val = current_val
        best_t: tuple[int, ...] | None = None
        in_s = set(current)
        for out in current:
            kept = [j for j in current if j != out]
            for inc in range(d):
                if inc in in_s:
                    continue
                t = tuple(sorted(kept + [inc]))
                val = value(t)
                if val > best_val or (best_t is not None and val == best_val
                                      and t < best_t):
                    best_val = val
                    best_t = t
        if best_t is None:
            return current
        current, current_val = best_t, best_val
