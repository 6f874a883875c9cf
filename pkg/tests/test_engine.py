from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pfle import (
    ConflictGraph,
    GeneratorConfig,
    assign_clients,
    build_conflict_graph,
    generate_instance,
    greedy_max_independent_set,
    lease_client_distance,
    make_instance,
    prune_unused_leases,
    run_dual_ascent,
    solution_cost,
    solve,
    solve_traced,
    triple_leases,
)
from pfle.engine import BOTH, PENALTY, REACHED
from pfle.verify import check_dual_feasibility

from conftest import reference_ascent, single_client

small_configs = st.builds(
    GeneratorConfig,
    seed=st.integers(1, 2 ** 32),
    num_points=st.integers(2, 6),
    num_facilities=st.integers(1, 3),
    num_clients=st.integers(0, 6),
    num_lease_types=st.integers(1, 3),
    horizon=st.integers(0, 12),
    cost_scale=st.integers(1, 12),
    penalty_scale=st.integers(1, 20),
    economy_of_scale=st.booleans(),
).filter(lambda c: c.num_facilities <= c.num_points)


def shifted_copy_instance():
    """A short lease at b is discarded in favour of a long lease at a; the
    client at time 0 is served by the copy starting one duration earlier."""
    return make_instance(
        ["a", "b"], [[0, 2], [2, 0]], ["a", "b"], [3, 6], [[100, 4], [1, 100]],
        [("b", 100, 0), ("a", 100, 2), ("a", 100, 7)],
    )


class TestAscent:
    def test_lease_paid_first(self, worked):
        res = run_dual_ascent(worked)
        f = worked.lease(0, 1, 0)
        assert res.alpha == (4,)
        assert res.tentatively_open == (f,)
        assert res.freeze[0].kind == REACHED and res.freeze[0].lease == f

    def test_penalty_first(self):
        res = run_dual_ascent(single_client(penalty=3))
        assert res.alpha == (3,)
        assert res.tentatively_open == ()
        assert res.freeze[0].kind == PENALTY

    def test_simultaneous_tie_follows_line_order(self):
        inst = single_client(penalty=4)
        res = run_dual_ascent(inst)
        assert res.tentatively_open == (inst.lease(0, 1, 0),)
        assert res.freeze[0].kind == BOTH
        assert set(res.events[-1].triggers) == {"paid", "penalty"}

    def test_two_clients_share(self):
        res = run_dual_ascent(single_client(n_clients=2))
        assert res.alpha == (2, 2)
        assert res.opening_clock[res.tentatively_open[0]] == 2

    def test_zero_penalties_freeze_at_zero(self):
        inst = single_client(penalty=0, n_clients=3)
        sol, res = solve(inst)
        assert res.alpha == (0, 0, 0)
        assert all(a is None for a in sol.assignment)
        assert solution_cost(inst, sol).total == 0

    def test_shifted_copy_instance_trace(self):
        inst = shifted_copy_instance()
        res = run_dual_ascent(inst)
        S, L = inst.lease(1, 1, 0), inst.lease(0, 2, 2)
        assert res.alpha == (1, 2, 2)
        assert res.tentatively_open == (S, L)
        assert res.opening_clock == {S: 1, L: 2}

    def test_no_clients(self):
        res = run_dual_ascent(single_client(n_clients=0))
        assert res.alpha == () and res.events == ()

    @settings(max_examples=60, deadline=None)
    @given(cfg=small_configs)
    def test_matches_reference(self, cfg):
        inst = generate_instance(cfg)
        res = run_dual_ascent(inst)
        alpha, opened = reference_ascent(inst)
        assert res.alpha == alpha
        assert set(res.tentatively_open) == set(opened)

    @settings(max_examples=60, deadline=None)
    @given(cfg=small_configs)
    def test_monotone_and_feasible_at_every_event(self, cfg):
        inst = generate_instance(cfg)
        res = run_dual_ascent(inst)
        clocks = [ev.clock for ev in res.events]
        assert clocks == sorted(clocks)
        frozen = [j for ev in res.events for j in ev.frozen]
        assert sorted(frozen) == list(range(len(inst.clients)))   # each client leaves S once
        prev = None
        for _, alpha in res.snapshots():
            if prev is not None:
                assert all(a >= b for a, b in zip(alpha, prev))
            assert check_dual_feasibility(inst, alpha).passed
            prev = alpha
        if res.events:
            assert prev == res.alpha

    @settings(max_examples=40, deadline=None)
    @given(cfg=small_configs)
    def test_freeze_reasons_match_removal_rule(self, cfg):
        inst = generate_instance(cfg)
        res = run_dual_ascent(inst)
        for j, reason in zip(inst.clients, res.freeze):
            a = res.alpha[j.id]
            reached = [f for f in res.tentatively_open
                       if lease_client_distance(inst, j, f) <= a]
            assert a <= j.penalty
            if reason.kind == PENALTY:
                assert a == j.penalty
            else:
                assert reason.lease in reached
                assert (reason.kind == BOTH) == (a == j.penalty)

    def test_determinism(self):
        inst = generate_instance(GeneratorConfig(seed=11))
        assert run_dual_ascent(inst) == run_dual_ascent(inst)


class TestConflictGraph:
    def test_empty(self):
        res = run_dual_ascent(single_client(penalty=3))
        g = build_conflict_graph(single_client(penalty=3), res)
        assert g.vertices == () and not g.edges

    def test_single_vertex(self, worked):
        g = build_conflict_graph(worked, run_dual_ascent(worked))
        assert len(g.vertices) == 1 and not g.edges

    def test_colocated_facilities_conflict(self):
        inst = make_instance(["u", "v"], [[0, 0], [0, 0]], ["u", "v"], [5], [[4], [4]],
                             [("u", 10, 0)])
        res = run_dual_ascent(inst)
        f, g = inst.lease(0, 1, 0), inst.lease(1, 1, 0)
        assert set(res.tentatively_open) == {f, g}
        graph = build_conflict_graph(inst, res)
        assert graph.edges == frozenset({frozenset((f, g))})
        assert graph.witness[frozenset((f, g))] == 0
        assert greedy_max_independent_set(graph) == (f,)


class TestIndependentSet:
    def leases(self, durations):
        inst = make_instance(["p"], [[0]], ["p"], durations, [[1] * len(durations)], [("p", 1, 0)])
        return [inst.lease(0, k, 0) for k in range(1, len(durations) + 1)]

    def test_empty(self):
        assert greedy_max_independent_set(ConflictGraph((), frozenset(), {})) == ()

    def test_longest_first(self):
        short, long_ = self.leases([2, 5])
        g = ConflictGraph((short, long_), frozenset({frozenset((short, long_))}), {})
        assert greedy_max_independent_set(g) == (long_,)

    def test_path_equal_durations(self):
        inst = make_instance(["p"], [[0]], ["p"], [3], [[1]], [("p", 1, 0)])
        f1, f2, f3 = (inst.lease(0, 1, t) for t in (0, 1, 2))
        g = ConflictGraph((f2, f3, f1), frozenset({frozenset((f1, f2)), frozenset((f2, f3))}), {})
        # the two maximal independent sets are {f2} and {f1, f3}; lease order visits f1 first
        assert greedy_max_independent_set(g) == (f1, f3)

    @settings(max_examples=60, deadline=None)
    @given(cfg=small_configs)
    def test_properties(self, cfg):
        inst = generate_instance(cfg)
        sol, tr = solve_traced(inst)
        kept = set(tr.independent)
        alpha = tr.ascent.alpha
        for j in inst.clients:
            hits = [f for f in kept if lease_client_distance(inst, j, f) <= alpha[j.id]]
            assert len(hits) <= 1
        for e in tr.graph.edges:
            assert not e <= kept
        # every discarded lease has a kept neighbour at least as long (the one
        # that blocked it), whose tripled window contains the discarded window
        for f in tr.graph.vertices:
            if f in kept:
                continue
            blockers = [g for g in tr.graph.neighbors(f) & kept if g.duration >= f.duration]
            assert blockers
            assert any(g.start - g.duration <= f.start and f.end <= g.start + 2 * g.duration
                       for g in blockers)


class TestTripleAndAssign:
    def test_triple_empty(self):
        assert triple_leases(()) == ()

    def test_triple_arithmetic(self):
        inst = make_instance(["p"], [[0]], ["p"], [5], [[4]], [("p", 1, 7)])
        assert [f.start for f in triple_leases((inst.lease(0, 1, 7),))] == [2, 7, 12]

    def test_triple_negative_start(self, worked):
        out = triple_leases((worked.lease(0, 1, 0),))
        assert [f.start for f in out] == [-5, 0, 5]
        assert sum(f.cost for f in out) == 12

    def test_not_reaching_is_null(self):
        inst = single_client(penalty=3)
        sol = assign_clients(inst, run_dual_ascent(inst), ())
        assert sol.assignment == (None,)

    def test_worked_assignment(self, worked):
        sol, _ = solve(worked)
        assert sol.assignment == (worked.lease(0, 1, 0),)

    def test_assigned_to_shifted_copy(self):
        inst = shifted_copy_instance()
        sol, tr = solve_traced(inst)
        S, L = inst.lease(1, 1, 0), inst.lease(0, 2, 2)
        assert tr.graph.has_edge(S, L) and tr.graph.witness[frozenset((S, L))] == 1
        assert tr.independent == (L,)
        j, w = inst.clients[0], inst.clients[1]
        a = sol.assignment[0]
        assert a == L.shifted(-4)
        d = lease_client_distance(inst, j, a)
        assert d == 2
        assert d <= lease_client_distance(inst, j, S) + 2 * tr.ascent.alpha[w.id]
        assert d <= 3 * tr.ascent.alpha[j.id]


class TestSolve:
    def test_worked(self, worked):
        sol, res = solve(worked)
        assert solution_cost(worked, sol).total == 12
        assert sum(res.alpha) == 4

    def test_penalty_variant(self):
        inst = single_client(penalty=3)
        sol, res = solve(inst)
        c = solution_cost(inst, sol)
        assert (c.total, c.penalty, sum(res.alpha)) == (3, 3, 3)

    def test_deterministic(self):
        inst = generate_instance(GeneratorConfig(seed=5))
        assert solve(inst) == solve(inst)


class TestPrune:
    def test_tripled(self, worked):
        sol, _ = solve(worked)
        pruned = prune_unused_leases(sol)
        assert pruned.leases == (worked.lease(0, 1, 0),)
        assert solution_cost(worked, pruned).total == 4
        assert pruned.assignment == sol.assignment

    def test_fixed_point(self, worked):
        f = worked.lease(0, 1, 0)
        from pfle import Solution
        sol = Solution((f,), (f,))
        assert prune_unused_leases(sol) == sol

    def test_empty(self):
        from pfle import Solution
        assert prune_unused_leases(Solution((), ())) == Solution((), ())

    @settings(max_examples=30, deadline=None)
    @given(cfg=small_configs)
    def test_never_increases(self, cfg):
        inst = generate_instance(cfg)
        sol, _ = solve(inst)
        pruned = prune_unused_leases(sol)
        assert solution_cost(inst, pruned).total <= solution_cost(inst, sol).total
        assert pruned.assignment == sol.assignment
