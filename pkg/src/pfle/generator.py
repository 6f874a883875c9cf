"""Seeded random instances.

Randomness comes from :class:`random.Random` (Mersenne Twister, seeded with the
64-bit seed) using only ``randint`` and ``sample``, whose output for a given
seed is stable across platforms. Distances are random integer edge weights on
the complete graph, closed under shortest paths, so the triangle inequality
holds by construction.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import InvalidConfig
from .model import make_instance


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int = 1
    num_points: int = 10
    num_facilities: int = 4
    num_clients: int = 8
    num_lease_types: int = 3
    horizon: int = 50
    cost_scale: int = 20
    penalty_scale: int = 30
    economy_of_scale: bool = True

    def validate(self):
        if not 0 <= self.seed < 2 ** 64:
            raise InvalidConfig("seed must be a 64-bit unsigned integer")
        if self.num_points < 1:
            raise InvalidConfig("need at least one point")
        if not 0 <= self.num_facilities <= self.num_points:
            raise InvalidConfig("num_facilities must be between 0 and num_points")
        if self.num_clients < 0 or self.num_lease_types < 1 or self.horizon < 0:
            raise InvalidConfig("sizes must be nonnegative and num_lease_types positive")
        if self.cost_scale < 1 or self.penalty_scale < 1:
            raise InvalidConfig("scales must be positive")


def metric_closure(w):
    """Floyd-Warshall on a square weight matrix (lists), in place."""
    n = len(w)
    for k in range(n):
        wk = w[k]
        for i in range(n):
            wi = w[i]
            wik = wi[k]
            for j in range(n):
                if wik + wk[j] < wi[j]:
                    wi[j] = wik + wk[j]
    return w


def generate_instance(cfg: GeneratorConfig):
    cfg.validate()
    rng = random.Random(cfg.seed)
    n = cfg.num_points

    w = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            w[i][j] = w[j][i] = rng.randint(1, cfg.cost_scale)
    metric_closure(w)

    facilities = sorted(rng.sample(range(n), cfg.num_facilities))

    step = max(1, cfg.horizon // (2 * cfg.num_lease_types))
    durations = []
    for _ in range(cfg.num_lease_types):
        durations.append((durations[-1] if durations else 0) + rng.randint(1, step))

    costs = []
    for _ in facilities:
        row = [rng.randint(1, cfg.cost_scale)]
        for k in range(1, cfg.num_lease_types):
            if cfg.economy_of_scale:
                # keep cost per unit time nonincreasing: row[k]/d[k] <= row[k-1]/d[k-1]
                hi = row[-1] * durations[k] // durations[k - 1]
                row.append(rng.randint(row[-1], hi))
            else:
                row.append(rng.randint(1, cfg.cost_scale * (k + 1)))
        costs.append(row)

    clients = [(rng.randrange(n), rng.randint(0, cfg.penalty_scale), rng.randint(0, cfg.horizon))
               for _ in range(cfg.num_clients)]
    return make_instance(range(n), w, facilities, durations, costs, clients)
