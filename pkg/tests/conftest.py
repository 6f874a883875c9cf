from fractions import Fraction
from pathlib import Path

import pytest

from pfle import UNREACHABLE, lease_client_distance, make_instance

FIXTURES = Path(__file__).parent / "fixtures"

# filled by test_acceptance, printed at the end of the session
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: (int(k[1:].split(".")[0]), k)):
        passed, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{key:6} {'PASS' if passed else 'FAIL'}  {detail}")


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def single_client(penalty=10, cost=4, duration=5, n_clients=1):
    """One point hosting a facility and ``n_clients`` clients arriving at time 0."""
    return make_instance(["p"], [[0]], ["p"], [duration], [[cost]],
                         [("p", penalty, 0)] * n_clients)


@pytest.fixture
def worked():
    return single_client()


def reference_ascent(inst):
    """Slow dual ascent used as an independent oracle.

    Recomputes every payment from scratch and finds the next event by scanning
    all (client, lease) pairs, without the incremental rate bookkeeping of the
    engine. Returns ``(alpha, open_leases_in_order)``.
    """
    cands = list(inst.candidates)
    clients = inst.clients
    alpha = [Fraction(0)] * len(clients)
    active = set(range(len(clients)))
    opened = []

    def dist(j, f):
        return lease_client_distance(inst, clients[j], f)

    def payment(f):
        return sum((alpha[j] - dist(j, f) for j in range(len(clients))
                    if dist(j, f) is not UNREACHABLE and alpha[j] > dist(j, f)), Fraction(0))

    clock = Fraction(0)
    while active:
        times = [clients[j].penalty for j in active]
        for j in active:
            for f in cands:
                d = dist(j, f)
                if d is not UNREACHABLE and d > clock:
                    times.append(d)
        for f in cands:
            if f in opened:
                continue
            gap = f.cost - payment(f)
            r = sum(1 for j in active if dist(j, f) is not UNREACHABLE and dist(j, f) <= clock)
            if gap == 0:
                times.append(clock)
            elif r:
                times.append(clock + gap / r)
        clock = min(times)
        for j in active:
            alpha[j] = clock
        for f in cands:
            if f not in opened and payment(f) == f.cost:
                opened.append(f)
        for j in list(active):
            reach = any(dist(j, f) is not UNREACHABLE and alpha[j] >= dist(j, f) for f in opened)
            if reach or alpha[j] >= clients[j].penalty:
                active.discard(j)
    return tuple(alpha), tuple(opened)
