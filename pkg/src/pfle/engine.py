"""Primal-dual solver: event-driven dual ascent, conflict graph, greedy
independent set, lease tripling and final assignment.

The ascent is simulated exactly. Between two events every active client's dual
value equals the shared clock, so the only quantities that change are the
payments towards unopened leases, each growing linearly at a rate equal to the
number of active clients that currently reach it. Events are:

* a crossing, when the clock reaches ``d(j, f)`` for an active client ``j``
  (this changes a payment rate, or freezes ``j`` if ``f`` is already open);
* a lease becoming fully paid;
* the clock reaching an active client's penalty.

At each event all fully paid leases are opened first, then every active client
that reaches an open lease or has exhausted its penalty is frozen.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import CoverageHole, NonTermination
from .model import (
    UNREACHABLE,
    LeaseDescriptor,
    Solution,
    ValidatedInstance,
    lease_client_distance,
    validate_instance,
)

REACHED = "reached"
PENALTY = "penalty"
BOTH = "both"


@dataclass(frozen=True)
class FreezeReason:
    """Why a client left the active set.

    ``kind`` is ``"reached"`` (an open lease), ``"penalty"`` (dual hit the
    penalty) or ``"both"``. ``lease`` is the first reached open lease in lease
    order, when there is one.
    """

    kind: str
    lease: Optional[LeaseDescriptor] = None


@dataclass(frozen=True)
class AscentEvent:
    clock: Fraction
    triggers: tuple          # subset of ("crossing", "paid", "penalty")
    opened: tuple            # leases opened at this clock
    frozen: tuple            # client ids frozen at this clock


@dataclass(frozen=True)
class AscentResult:
    alpha: tuple
    tentatively_open: tuple            # X, in opening order
    opening_clock: dict
    freeze: tuple                      # FreezeReason per client
    events: tuple

    def snapshots(self):
        """Replay the event log, yielding ``(clock, alpha)`` after every event.

        Active clients carry the clock value, frozen clients keep the value
        they had when they froze.
        """
        n = len(self.alpha)
        frozen_at = {}
        for ev in self.events:
            for j in ev.frozen:
                frozen_at[j] = ev.clock
            yield ev.clock, tuple(frozen_at.get(j, ev.clock) for j in range(n))


def _reaches(inst, j, f, alpha_j) -> bool:
    d = lease_client_distance(inst, j, f)
    return d is not UNREACHABLE and alpha_j >= d


def run_dual_ascent(inst: ValidatedInstance) -> AscentResult:
    inst = validate_instance(inst)
    clients = inst.clients
    cands = inst.candidates
    nc = len(cands)
    zero = Fraction(0)

    # finite (distance, lease index) pairs per client, nearest first
    reach_list = []
    for j in clients:
        row = []
        for fi, f in enumerate(cands):
            d = lease_client_distance(inst, j, f)
            if d is not UNREACHABLE:
                row.append((d, fi))
        row.sort()
        reach_list.append(row)

    clock = zero
    alpha = [zero] * len(clients)
    active = list(range(len(clients)))
    ptr = [0] * len(clients)          # reach_list[j][:ptr[j]] are reached
    rate = [0] * nc
    payment = [zero] * nc
    is_open = [False] * nc
    opened_order = []
    opening_clock = {}
    freeze = [None] * len(clients)
    events = []

    def pass_crossings(j):
        row = reach_list[j]
        p = ptr[j]
        while p < len(row) and row[p][0] <= clock:
            rate[row[p][1]] += 1
            p += 1
        ptr[j] = p

    for j in active:
        pass_crossings(j)

    budget = len(clients) * (nc + 2) + 1
    while active:
        if len(events) >= budget:
            raise NonTermination(f"dual ascent exceeded {budget} events")

        t_pen = min(clients[j].penalty for j in active)
        t_cross = None
        for j in active:
            if ptr[j] < len(reach_list[j]):
                d = reach_list[j][ptr[j]][0]
                if t_cross is None or d < t_cross:
                    t_cross = d
        t_paid = None
        for fi in range(nc):
            if is_open[fi]:
                continue
            gap = cands[fi].cost - payment[fi]
            if gap == 0:
                t = clock
            elif rate[fi]:
                t = clock + gap / rate[fi]
            else:
                continue
            if t_paid is None or t < t_paid:
                t_paid = t

        nxt = t_pen
        for t in (t_cross, t_paid):
            if t is not None and t < nxt:
                nxt = t
        triggers = tuple(name for name, t in (("crossing", t_cross), ("paid", t_paid),
                                              ("penalty", t_pen)) if t == nxt)

        delta = nxt - clock
        if delta:
            for fi in range(nc):
                if not is_open[fi] and rate[fi]:
                    payment[fi] += rate[fi] * delta
        clock = nxt
        for j in active:
            alpha[j] = clock
            pass_crossings(j)

        # line 10 before line 11
        newly_open = []
        for fi in range(nc):
            if not is_open[fi] and payment[fi] >= cands[fi].cost:
                assert payment[fi] == cands[fi].cost, "lease overpaid"
                is_open[fi] = True
                newly_open.append(cands[fi])
                opened_order.append(cands[fi])
                opening_clock[cands[fi]] = clock

        still = []
        frozen = []
        for j in active:
            hit = next((cands[fi] for _, fi in sorted(reach_list[j][:ptr[j]], key=lambda x: x[1])
                        if is_open[fi]), None)
            pen = alpha[j] >= clients[j].penalty
            if hit is None and not pen:
                still.append(j)
                continue
            if hit is not None and pen:
                freeze[j] = FreezeReason(BOTH, hit)
            elif hit is not None:
                freeze[j] = FreezeReason(REACHED, hit)
            else:
                freeze[j] = FreezeReason(PENALTY)
            frozen.append(j)
            for _, fi in reach_list[j][:ptr[j]]:
                rate[fi] -= 1
        active = still
        events.append(AscentEvent(clock, triggers, tuple(newly_open), tuple(frozen)))

    return AscentResult(
        alpha=tuple(alpha),
        tentatively_open=tuple(opened_order),
        opening_clock=opening_clock,
        freeze=tuple(freeze),
        events=tuple(events),
    )


@dataclass(frozen=True)
class ConflictGraph:
    vertices: tuple
    edges: frozenset                   # frozensets {f, g}
    witness: dict = field(compare=False)

    def neighbors(self, f):
        return {g for e in self.edges if f in e for g in e if g != f}

    def has_edge(self, f, g) -> bool:
        return frozenset((f, g)) in self.edges


def reached_leases(inst, result: AscentResult, leases) -> list:
    """For each client, the leases of ``leases`` it reaches under the final duals."""
    return [[f for f in leases if _reaches(inst, j, f, result.alpha[j.id])]
            for j in inst.clients]


def build_conflict_graph(inst, result: AscentResult) -> ConflictGraph:
    X = tuple(result.tentatively_open)
    edges = set()
    witness = {}
    for j, reached in zip(inst.clients, reached_leases(inst, result, X)):
        for a in range(len(reached)):
            for b in range(a + 1, len(reached)):
                e = frozenset((reached[a], reached[b]))
                if e not in edges:
                    edges.add(e)
                    witness[e] = j.id
    return ConflictGraph(X, frozenset(edges), witness)


def greedy_max_independent_set(graph: ConflictGraph) -> tuple:
    """Visit leases by decreasing duration (lease order breaks ties) and keep
    every lease with no kept neighbour."""
    adj = {f: set() for f in graph.vertices}
    for e in graph.edges:
        f, g = tuple(e)
        adj[f].add(g)
        adj[g].add(f)
    chosen = []
    taken = set()
    for f in sorted(graph.vertices, key=lambda f: (-f.duration, f)):
        if not adj[f] & taken:
            chosen.append(f)
            taken.add(f)
    return tuple(chosen)


def triple_leases(independent) -> tuple:
    """Buy each kept lease together with a copy one duration earlier and one later.

    Copies may start before time 0. Coinciding copies are bought once.
    """
    out = set()
    for f in independent:
        for s in (f.start - f.duration, f.start, f.start + f.duration):
            out.add(f.shifted(s))
    return tuple(sorted(out))


def assign_clients(inst, result: AscentResult, purchased) -> Solution:
    purchased = tuple(sorted(purchased))
    X = result.tentatively_open
    assignment = []
    for j in inst.clients:
        if not any(_reaches(inst, j, f, result.alpha[j.id]) for f in X):
            assignment.append(None)
            continue
        best = min(purchased, key=lambda f: (lease_client_distance(inst, j, f), f), default=None)
        if best is None or lease_client_distance(inst, j, best) is UNREACHABLE:
            raise CoverageHole(f"client {j.id} reaches a tentatively open lease "
                               f"but no purchased lease covers time {j.arrival}")
        assignment.append(best)
    return Solution(purchased, tuple(assignment))


@dataclass(frozen=True)
class SolveTrace:
    """Everything produced on the way to a solution, for certification."""

    ascent: AscentResult
    graph: ConflictGraph
    independent: tuple
    purchased: tuple


def solve_traced(inst) -> tuple:
    """Run the full algorithm, returning ``(solution, trace)``."""
    inst = validate_instance(inst)
    ascent = run_dual_ascent(inst)
    graph = build_conflict_graph(inst, ascent)
    independent = greedy_max_independent_set(graph)
    purchased = triple_leases(independent)
    sol = assign_clients(inst, ascent, purchased)
    return sol, SolveTrace(ascent, graph, independent, purchased)


def solve(inst) -> tuple:
    """Run the full algorithm, returning ``(solution, ascent_result)``."""
    sol, trace = solve_traced(inst)
    return sol, trace.ascent


def prune_unused_leases(sol: Solution) -> Solution:
    used = {f for f in sol.assignment if f is not None}
    return Solution(tuple(f for f in sol.leases if f in used), sol.assignment)
