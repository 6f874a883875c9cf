"""Exact optimum for small instances by exhaustive search over lease subsets.

Once the purchased leases are fixed the problem separates per client: each
client pays the cheaper of its penalty and its nearest covering lease. The
search walks the include/exclude tree over the candidate leases and skips a
subtree when even buying every remaining lease cannot beat the incumbent.
Leases are restricted to the candidate start times (client arrivals), which
loses nothing: sliding a lease later until it starts at the earliest arrival
it serves keeps its served set and its cost.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import TooLarge
from .model import (
    UNREACHABLE,
    CostBreakdown,
    Solution,
    ValidatedInstance,
    lease_client_distance,
    validate_instance,
)


@dataclass(frozen=True)
class OracleLimits:
    max_candidate_leases: int = 20
    max_clients: int = 12


def best_assignment_given_leases(inst: ValidatedInstance, leases) -> tuple:
    """Cheapest assignment for a fixed lease set.

    Ties go to the earlier lease in lease order; the penalty is taken only when
    it is strictly cheaper than every covering lease.
    """
    leases = sorted(set(leases))
    leasing = sum((f.cost for f in leases), Fraction(0))
    connection = Fraction(0)
    penalty = Fraction(0)
    assignment = []
    for j in inst.clients:
        best, best_d = None, UNREACHABLE
        for f in leases:
            d = lease_client_distance(inst, j, f)
            if d < best_d:
                best, best_d = f, d
        if best is not None and best_d <= j.penalty:
            assignment.append(best)
            connection += best_d
        else:
            assignment.append(None)
            penalty += j.penalty
    return tuple(assignment), CostBreakdown(leasing, connection, penalty)


def exact_opt(inst, limits: OracleLimits = OracleLimits()) -> tuple:
    """Return ``(solution, opt_value)`` for an instance within ``limits``."""
    inst = validate_instance(inst)
    cands = inst.candidates
    if len(cands) > limits.max_candidate_leases:
        raise TooLarge(f"{len(cands)} candidate leases exceed the limit of "
                       f"{limits.max_candidate_leases}")
    if len(inst.clients) > limits.max_clients:
        raise TooLarge(f"{len(inst.clients)} clients exceed the limit of {limits.max_clients}")

    clients = inst.clients
    nc = len(cands)
    # dist[i][j]: connection cost of client j via lease i, None when uncovered
    dist = [[None if (d := lease_client_distance(inst, j, f)) is UNREACHABLE else d
             for j in clients] for f in cands]
    # suffix_best[i][j]: cheapest connection of j using only leases i.. (or penalty)
    suffix_best = [[j.penalty for j in clients] for _ in range(nc + 1)]
    for i in range(nc - 1, -1, -1):
        nxt = suffix_best[i + 1]
        suffix_best[i] = [min(nxt[j], d) if d is not None else nxt[j]
                          for j, d in enumerate(dist[i])]

    penalties = [j.penalty for j in clients]
    best_value = sum(penalties, Fraction(0))
    best_set = ()
    chosen = []

    def lower_bound(i, leasing, current):
        tail = suffix_best[i]
        return leasing + sum(min(c, t) for c, t in zip(current, tail))

    def search(i, leasing, current):
        nonlocal best_value, best_set
        if lower_bound(i, leasing, current) >= best_value:
            return
        if i == nc:
            best_value = leasing + sum(current)
            best_set = tuple(chosen)
            return
        f = cands[i]
        row = dist[i]
        if any(d is not None and d < c for d, c in zip(row, current)):
            chosen.append(f)
            search(i + 1, leasing + f.cost,
                   [min(c, d) if d is not None else c for c, d in zip(current, row)])
            chosen.pop()
        search(i + 1, leasing, current)

    search(0, Fraction(0), penalties)
    assignment, cost = best_assignment_given_leases(inst, best_set)
    used = {f for f in assignment if f is not None}
    sol = Solution(tuple(f for f in best_set if f in used), assignment)
    assert cost.total == best_value
    return sol, best_value
