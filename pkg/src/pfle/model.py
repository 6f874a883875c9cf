"""Domain types for facility leasing with penalties.

All numbers are :class:`fractions.Fraction`. Distances between a client and a
lease are *time gated*: a lease only serves clients whose arrival falls inside
its half-open window ``[start, start + duration)``; every other pair is
:data:`UNREACHABLE`.
"""

from __future__ import annotations

import functools
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

from .errors import DanglingReference, InfeasibleAssignment, MetricViolation, NegativeValue

Point = Hashable


@functools.total_ordering
class _Unreachable:
    """Distance of a lease that does not cover a client's arrival.

    Compares greater than every finite value and refuses arithmetic.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNREACHABLE"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("pfle.UNREACHABLE")

    def __lt__(self, other):
        return False

    def __gt__(self, other):
        return other is not self

    def __le__(self, other):
        return other is self

    def __ge__(self, other):
        return True


UNREACHABLE = _Unreachable()


def as_fraction(value) -> Fraction:
    """Convert ints, fraction strings ("3/2") and decimal strings ("1.5") exactly."""
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, float):
        # floats are accepted only when they are integral; anything else is lossy
        if not value.is_integer():
            raise TypeError(f"non-integral float {value!r}; pass a decimal string instead")
        return Fraction(int(value))
    return Fraction(value)


@dataclass(frozen=True)
class Client:
    id: int
    position: Point
    penalty: Fraction
    arrival: int


@dataclass(frozen=True, order=True)
class LeaseDescriptor:
    """A facility lease ``(facility, lease_type, start)``.

    Ordering and equality use ``(facility_index, lease_type, start)``, which is
    also the deterministic tie-break order used throughout the solver.
    ``lease_type`` is 1-based.
    """

    facility_index: int
    lease_type: int
    start: int
    facility: Point = field(compare=False)
    duration: int = field(compare=False)
    cost: Fraction = field(compare=False)

    @property
    def end(self) -> int:
        return self.start + self.duration

    def covers(self, time: int) -> bool:
        return self.start <= time < self.start + self.duration

    def shifted(self, start: int) -> "LeaseDescriptor":
        return LeaseDescriptor(self.facility_index, self.lease_type, start,
                               self.facility, self.duration, self.cost)

    def __str__(self):
        return f"({self.facility!r}, k={self.lease_type}, t={self.start})"


@dataclass(frozen=True)
class Instance:
    """Raw problem data. Use :func:`validate_instance` before solving."""

    points: tuple
    dist: tuple            # row-major, aligned with ``points``
    facilities: tuple
    lease_durations: tuple  # index k-1 holds the duration of lease type k
    lease_costs: tuple     # facility-major: lease_costs[i][k-1]
    clients: tuple

    @property
    def num_lease_types(self) -> int:
        return len(self.lease_durations)


@dataclass(frozen=True)
class ValidatedInstance(Instance):
    """An :class:`Instance` whose invariants were checked, plus lookup indexes."""

    point_index: Mapping = field(init=False, repr=False, compare=False)
    arrival_times: tuple = field(init=False, repr=False, compare=False)
    clients_by_point: Mapping = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        _check(self)
        set_ = functools.partial(object.__setattr__, self)
        set_("point_index", {p: i for i, p in enumerate(self.points)})
        set_("arrival_times", tuple(sorted({c.arrival for c in self.clients})))
        by_point = defaultdict(list)
        for c in self.clients:
            by_point[c.position].append(c.id)
        set_("clients_by_point", {p: tuple(ids) for p, ids in by_point.items()})

    def d(self, u: Point, v: Point) -> Fraction:
        pi = self.point_index
        return self.dist[pi[u]][pi[v]]

    def lease(self, facility_index: int, lease_type: int, start: int) -> LeaseDescriptor:
        return LeaseDescriptor(
            facility_index, lease_type, start,
            self.facilities[facility_index],
            self.lease_durations[lease_type - 1],
            self.lease_costs[facility_index][lease_type - 1],
        )

    @functools.cached_property
    def candidates(self) -> tuple:
        return tuple(candidate_leases(self))


def make_instance(points: Sequence, dist: Sequence[Sequence], facilities: Sequence,
                  lease_durations: Sequence[int], lease_costs: Sequence[Sequence],
                  clients: Iterable) -> ValidatedInstance:
    """Build and validate an instance from plain Python values.

    ``clients`` holds ``(position, penalty, arrival)`` triples or :class:`Client`
    objects; ids are reassigned densely in the given order.
    """
    cl = []
    for i, c in enumerate(clients):
        if isinstance(c, Client):
            c = (c.position, c.penalty, c.arrival)
        pos, pen, arr = c
        cl.append(Client(i, pos, as_fraction(pen), arr))
    raw = Instance(
        points=tuple(points),
        dist=tuple(tuple(as_fraction(x) for x in row) for row in dist),
        facilities=tuple(facilities),
        lease_durations=tuple(lease_durations),
        lease_costs=tuple(tuple(as_fraction(x) for x in row) for row in lease_costs),
        clients=tuple(cl),
    )
    return validate_instance(raw)


def validate_instance(raw: Instance) -> ValidatedInstance:
    if isinstance(raw, ValidatedInstance):
        return raw
    return ValidatedInstance(raw.points, raw.dist, raw.facilities, raw.lease_durations,
                             raw.lease_costs, raw.clients)


def _is_time(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _check(inst: Instance) -> None:
    n = len(inst.points)
    if len(set(inst.points)) != n:
        raise DanglingReference("points", "duplicate point id")
    if len(inst.dist) != n or any(len(row) != n for row in inst.dist):
        raise DanglingReference("dist", f"matrix shape does not match {n} points")
    D = inst.dist
    for u in range(n):
        for v in range(n):
            if D[u][v] < 0:
                raise NegativeValue("dist", (inst.points[u], inst.points[v]))
    for u in range(n):
        if D[u][u] != 0:
            raise MetricViolation(inst.points[u], inst.points[u], detail="nonzero self distance")
        for v in range(u + 1, n):
            if D[u][v] != D[v][u]:
                raise MetricViolation(inst.points[u], inst.points[v], detail="asymmetric")
    for v in range(n):
        Dv = D[v]
        for u in range(n):
            duv = D[u][v]
            Du = D[u]
            for w in range(n):
                if Du[w] > duv + Dv[w]:
                    raise MetricViolation(inst.points[u], inst.points[v], inst.points[w],
                                          detail="triangle inequality")

    known = set(inst.points)
    if len(set(inst.facilities)) != len(inst.facilities):
        raise DanglingReference("facilities", "duplicate facility")
    for p in inst.facilities:
        if p not in known:
            raise DanglingReference("facilities", p)
    K = len(inst.lease_durations)
    if K < 1:
        raise NegativeValue("lease_durations", "need at least one lease type")
    for k, delta in enumerate(inst.lease_durations, start=1):
        if not _is_time(delta) or delta < 1:
            raise NegativeValue(f"lease_durations[{k}]", delta)
    if len(inst.lease_costs) != len(inst.facilities):
        raise DanglingReference("lease_costs", "one row per facility required")
    for i, row in enumerate(inst.lease_costs):
        if len(row) != K:
            raise DanglingReference(f"lease_costs[{i}]", f"expected {K} costs")
        for c in row:
            if c < 0:
                raise NegativeValue(f"lease_costs[{i}]", c)
    for i, c in enumerate(inst.clients):
        if c.id != i:
            raise DanglingReference("clients", f"client id {c.id} at position {i}")
        if c.position not in known:
            raise DanglingReference(f"clients[{i}].point", c.position)
        if c.penalty < 0:
            raise NegativeValue(f"clients[{i}].penalty", c.penalty)
        if not _is_time(c.arrival) or c.arrival < 0:
            raise NegativeValue(f"clients[{i}].arrival", c.arrival)


def lease_client_distance(inst: ValidatedInstance, j: Client, f: LeaseDescriptor):
    """Time-gated distance: finite iff ``f`` covers the arrival of ``j``."""
    if f.start <= j.arrival < f.start + f.duration:
        return inst.d(j.position, f.facility)
    return UNREACHABLE


def candidate_leases(inst: ValidatedInstance) -> list:
    """Every facility, lease type and distinct arrival time, in lease order."""
    return [inst.lease(i, k, t)
            for i in range(len(inst.facilities))
            for k in range(1, inst.num_lease_types + 1)
            for t in inst.arrival_times]


@dataclass(frozen=True)
class Solution:
    """Purchased leases plus a per-client assignment (``None`` = pay penalty)."""

    leases: tuple
    assignment: tuple

    def __post_init__(self):
        object.__setattr__(self, "leases", tuple(sorted(set(self.leases))))
        object.__setattr__(self, "assignment", tuple(self.assignment))


@dataclass(frozen=True)
class CostBreakdown:
    leasing: Fraction
    connection: Fraction
    penalty: Fraction

    @property
    def total(self) -> Fraction:
        return self.leasing + self.connection + self.penalty

    def as_dict(self) -> dict:
        return {"leasing": self.leasing, "connection": self.connection,
                "penalty": self.penalty, "total": self.total}


def solution_cost(inst: ValidatedInstance, sol: Solution) -> CostBreakdown:
    leasing = sum((f.cost for f in sol.leases), Fraction(0))
    connection = Fraction(0)
    penalty = Fraction(0)
    for j, f in zip(inst.clients, sol.assignment):
        if f is None:
            penalty += j.penalty
            continue
        d = lease_client_distance(inst, j, f)
        if d is UNREACHABLE:
            raise InfeasibleAssignment(j.id, f)
        connection += d
    return CostBreakdown(leasing, connection, penalty)
