"""Exact minimum-cost maximum matching on small complete bipartite graphs.

On a complete bipartite graph with ``p`` left and ``q`` right nodes every
maximum matching has ``min(p, q)`` edges, so the problem is a rectangular
linear assignment problem.  ``solve_lap`` is the production solver;
``brute_force_lap`` enumerates every maximum matching and exists as an
independent oracle for tests.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

BRUTE_FORCE_LIMIT = 8


@dataclass(frozen=True)
class MatchingSolution:
    """A maximum matching together with its total edge cost."""

    pairs: frozenset[tuple[int, int]]
    total_cost: float
    is_optimal: bool = True

    def __post_init__(self) -> None:
        rows = [r for r, _ in self.pairs]
        cols = [c for _, c in self.pairs]
        if len(set(rows)) != len(rows) or len(set(cols)) != len(cols):
            raise ValueError("matching reuses a row or column")


def _validate_costs(costs: np.ndarray) -> np.ndarray:
    costs = np.asarray(costs, dtype=np.float64)
    if costs.ndim != 2 or costs.size == 0:
        raise ValueError(f"cost matrix must be 2-D and nonempty, got shape {costs.shape}")
    if not np.all(np.isfinite(costs)):
        raise ValueError("cost matrix contains non-finite entries")
    if np.any(costs < 0):
        raise ValueError("cost matrix contains negative entries")
    return costs


def solve_lap(costs: np.ndarray) -> MatchingSolution:
    """Minimum-cost maximum matching via shortest augmenting paths.

    Handles rectangular matrices natively; the returned matching has
    ``min(p, q)`` pairs.  When several matchings share the optimal cost an
    arbitrary one is returned; the cost itself is unique.
    """
    costs = _validate_costs(costs)
    rows, cols = linear_sum_assignment(costs)
    total = float(costs[rows, cols].sum())
    pairs = frozenset((int(r), int(c)) for r, c in zip(rows, cols))
    return MatchingSolution(pairs=pairs, total_cost=total)


def solve_lap_cost(costs: np.ndarray) -> float:
    """Cost-only fast path used by the contrast computation's inner loop."""
    rows, cols = linear_sum_assignment(costs)
    return float(costs[rows, cols].sum())


def brute_force_lap(costs: np.ndarray) -> MatchingSolution:
    """Enumerate all maximum matchings and return the cheapest.

    Factorial-time; refuses matrices with ``min(p, q) > BRUTE_FORCE_LIMIT``.
    """
    costs = _validate_costs(costs)
    p, q = costs.shape
    transposed = p > q
    if transposed:
        costs = costs.T
        p, q = q, p
    if p > BRUTE_FORCE_LIMIT:
        raise ValueError(f"matrix too large for enumeration: min side {p} > {BRUTE_FORCE_LIMIT}")

    perms = np.array(list(itertools.permutations(range(q), p)), dtype=np.intp)
    totals = costs[np.arange(p), perms].sum(axis=1)
    best = int(np.argmin(totals))
    assignment = perms[best]
    if transposed:
        pairs = frozenset((int(c), int(r)) for r, c in enumerate(assignment))
    else:
        pairs = frozenset((int(r), int(c)) for r, c in enumerate(assignment))
    return MatchingSolution(pairs=pairs, total_cost=float(totals[best]))


def brute_force_lap_cost(costs: np.ndarray) -> float:
    return brute_force_lap(costs).total_cost
