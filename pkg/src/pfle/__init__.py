"""Facility leasing with penalties: a primal-dual 3-approximation solver,
certificate checkers and an exact brute-force oracle."""

from .engine import (
    AscentResult,
    ConflictGraph,
    FreezeReason,
    SolveTrace,
    assign_clients,
    build_conflict_graph,
    greedy_max_independent_set,
    prune_unused_leases,
    run_dual_ascent,
    solve,
    solve_traced,
    triple_leases,
)
from .generator import GeneratorConfig, generate_instance
from .io import read_instance, read_solution, write_instance
from .model import (
    UNREACHABLE,
    Client,
    CostBreakdown,
    Instance,
    LeaseDescriptor,
    Solution,
    ValidatedInstance,
    candidate_leases,
    lease_client_distance,
    make_instance,
    solution_cost,
    validate_instance,
)
from .oracle import OracleLimits, best_assignment_given_leases, exact_opt
from .verify import (
    AlphaDecomposition,
    CertificateReport,
    certify,
    check_dual_feasibility,
    check_primal_feasibility,
    check_ratio,
    decompose_alpha,
)

__version__ = "0.1.0"
