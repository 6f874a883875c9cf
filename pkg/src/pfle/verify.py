"""Certificate checkers for solver output.

Each check returns a :class:`CertificateReport`; failures carry a concrete
witness (client, lease, or the two sides of the violated inequality). All
comparisons are exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import InfeasibleAssignment, MultipleReached
from .model import UNREACHABLE, CostBreakdown, lease_client_distance, solution_cost

CASE_INDEPENDENT = "reaches-independent"   # reaches a lease of the independent set
CASE_OPEN_ONLY = "reaches-open-only"       # reaches only discarded open leases
CASE_NOTHING = "reaches-nothing"


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    witness: Optional[str] = None


@dataclass
class CertificateReport:
    checks: list = field(default_factory=list)
    dual_objective: Optional[Fraction] = None
    cost: Optional[CostBreakdown] = None
    ratio: Optional[Fraction] = None   # None when the dual objective is 0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def add(self, name, passed, witness=None):
        self.checks.append(Check(name, bool(passed), None if passed else witness))

    def extend(self, other: "CertificateReport") -> "CertificateReport":
        self.checks.extend(other.checks)
        for attr in ("dual_objective", "cost", "ratio"):
            if getattr(other, attr) is not None:
                setattr(self, attr, getattr(other, attr))
        return self


def check_primal_feasibility(inst, sol) -> CertificateReport:
    rep = CertificateReport()
    n = len(inst.clients)
    rep.add("assignment_length", len(sol.assignment) == n,
            f"{len(sol.assignment)} entries for {n} clients")
    bought = set(sol.leases)
    unbought = [(j, f) for j, f in enumerate(sol.assignment) if f is not None and f not in bought]
    rep.add("assigned_lease_purchased", not unbought,
            f"client {unbought[0][0]} -> {unbought[0][1]}" if unbought else None)
    uncovered = [(j.id, f) for j, f in zip(inst.clients, sol.assignment)
                 if f is not None and lease_client_distance(inst, j, f) is UNREACHABLE]
    rep.add("assigned_lease_covers_arrival", not uncovered,
            f"client {uncovered[0][0]} -> {uncovered[0][1]}" if uncovered else None)
    bad_facility = [f for f in sol.leases
                    if not (0 <= f.facility_index < len(inst.facilities)
                            and inst.facilities[f.facility_index] == f.facility
                            and 1 <= f.lease_type <= inst.num_lease_types)]
    rep.add("leases_well_formed", not bad_facility,
            str(bad_facility[0]) if bad_facility else None)
    if rep.passed:
        rep.cost = solution_cost(inst, sol)
    return rep


def lease_payment(inst, alpha, f) -> Fraction:
    total = Fraction(0)
    for j in inst.clients:
        d = lease_client_distance(inst, j, f)
        if d is not UNREACHABLE and alpha[j.id] > d:
            total += alpha[j.id] - d
    return total


def check_dual_feasibility(inst, alpha) -> CertificateReport:
    """Both dual constraint families over the candidate leases.

    Checking candidates suffices: the set of arrivals a lease covers is a
    contiguous run of arrival times, and sliding its start to the earliest
    covered arrival keeps that set, so the largest possible payment towards any
    lease is attained at a candidate start.
    """
    rep = CertificateReport()
    alpha = tuple(alpha)
    neg = [j.id for j in inst.clients if alpha[j.id] < 0]
    rep.add("alpha_nonnegative", not neg, f"client {neg[0]}" if neg else None)
    over = [j for j in inst.clients if alpha[j.id] > j.penalty]
    rep.add("alpha_within_penalty", not over,
            f"client {over[0].id}: alpha {alpha[over[0].id]} > penalty {over[0].penalty}"
            if over else None)
    witness = None
    for f in inst.candidates:
        pay = lease_payment(inst, alpha, f)
        if pay > f.cost:
            witness = f"lease {f}: payment {pay} > cost {f.cost}"
            break
    rep.add("lease_payment_within_cost", witness is None, witness)
    rep.dual_objective = sum(alpha, Fraction(0))
    return rep


@dataclass(frozen=True)
class AlphaDecomposition:
    alpha_C: tuple
    alpha_F: tuple
    alpha_P: tuple
    case: tuple
    reached: tuple          # the reached independent-set lease per client, or None
    independent: tuple

    def totals(self) -> tuple:
        z = Fraction(0)
        return sum(self.alpha_C, z), sum(self.alpha_F, z), sum(self.alpha_P, z)


def decompose_alpha(inst, result, independent) -> AlphaDecomposition:
    alpha = result.alpha
    C, F, P, case, reached = [], [], [], [], []
    for j in inst.clients:
        a = alpha[j.id]
        hits = [f for f in independent
                if (d := lease_client_distance(inst, j, f)) is not UNREACHABLE and a >= d]
        if len(hits) > 1:
            raise MultipleReached(f"client {j.id} reaches {', '.join(map(str, hits))}")
        if hits:
            d = lease_client_distance(inst, j, hits[0])
            C.append(d); F.append(a - d); P.append(Fraction(0))
            case.append(CASE_INDEPENDENT); reached.append(hits[0])
            continue
        reached.append(None)
        in_open = any((d := lease_client_distance(inst, j, f)) is not UNREACHABLE and a >= d
                      for f in result.tentatively_open)
        if in_open:
            C.append(a); F.append(Fraction(0)); P.append(Fraction(0))
            case.append(CASE_OPEN_ONLY)
        else:
            C.append(Fraction(0)); F.append(Fraction(0)); P.append(a)
            case.append(CASE_NOTHING)
    return AlphaDecomposition(tuple(C), tuple(F), tuple(P), tuple(case), tuple(reached),
                              tuple(independent))


def check_ratio(inst, sol, result, decomposition: AlphaDecomposition) -> CertificateReport:
    rep = CertificateReport()
    try:
        cost = solution_cost(inst, sol)
    except InfeasibleAssignment as exc:
        rep.add("solution_costable", False, str(exc))
        return rep
    rep.cost = cost
    sum_alpha = sum(result.alpha, Fraction(0))
    rep.dual_objective = sum_alpha
    sC, sF, sP = decomposition.totals()

    bad = [j.id for j in inst.clients
           if decomposition.alpha_C[j.id] + decomposition.alpha_F[j.id]
           + decomposition.alpha_P[j.id] != result.alpha[j.id]]
    rep.add("decomposition_sums_to_alpha", not bad, f"client {bad[0]}" if bad else None)

    kept = sum((f.cost for f in decomposition.independent), Fraction(0))
    rep.add("independent_cost_equals_alpha_F", kept == sF, f"{kept} != {sF}")
    rep.add("leasing_within_3_alpha_F", cost.leasing <= 3 * sF, f"{cost.leasing} > 3*{sF}")
    rep.add("penalty_equals_alpha_P", cost.penalty == sP, f"{cost.penalty} != {sP}")

    witness = None
    for j, f in zip(inst.clients, sol.assignment):
        if f is None:
            continue
        d = lease_client_distance(inst, j, f)
        if d > 3 * decomposition.alpha_C[j.id]:
            witness = f"client {j.id}: d={d} > 3*{decomposition.alpha_C[j.id]}"
            break
    rep.add("connection_within_3_alpha_C", witness is None, witness)

    rep.add("total_within_3_dual", cost.total <= 3 * sum_alpha,
            f"{cost.total} > 3*{sum_alpha}")
    rep.ratio = cost.total / sum_alpha if sum_alpha else None
    return rep


def certify(inst, sol, trace) -> CertificateReport:
    """Run every check on one solve; ``trace`` is an :class:`~pfle.engine.SolveTrace`."""
    rep = CertificateReport()
    rep.extend(check_primal_feasibility(inst, sol))
    rep.extend(check_dual_feasibility(inst, trace.ascent.alpha))
    try:
        dec = decompose_alpha(inst, trace.ascent, trace.independent)
    except MultipleReached as exc:
        rep.add("unique_independent_lease_per_client", False, str(exc))
        return rep
    rep.extend(check_ratio(inst, sol, trace.ascent, dec))
    return rep
