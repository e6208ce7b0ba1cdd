"""Randomized self-checks: each fast path against an independent slow route.

* ``routing``: Dijkstra against exhaustive simple-path enumeration.
* ``allocation``: closed-form allocations against the numeric oracle.
* ``kl``: the scalar single-key relative entropy against the dense
  Gaussian computation on the full warden covariance.

Every case is derived from ``seed + case`` so a failure can be replayed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .allocation import ALL_REGIMES, closed_form, numeric_oracle
from .covertness import exact_kl_sk, kl_gaussian_oracle, sk_gaussian_pair
from .routing import BRUTE_FORCE_MAX_NODES, brute_force_route, build_graph
from .scenario import generate_random
from . import kernels

ROUTING_RTOL = 1e-12
ALLOCATION_RTOL = 1e-6
KL_RTOL = 1e-10


@dataclass
class SuiteReport:
    name: str
    cases: int
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def _rel(a: float, b: float) -> float:
    if a == b:
        return 0.0
    return abs(a - b) / max(abs(a), abs(b))


def random_small_scenario(seed: int, size_cap: int = 8, max_wardens: int = 5):
    rng = np.random.default_rng([seed, 7])
    relays = int(rng.integers(0, size_cap - 1))
    wardens = int(rng.integers(1, max_wardens + 1))
    alpha = float(rng.choice([2.0, 2.5, 3.0, 4.0]))
    return generate_random(seed, relays, wardens, 100.0, alpha)


def check_routing_case(seed: int, size_cap: int = 8, fault: float = 0.0) -> list[str]:
    """Compare Dijkstra with brute force on one random scenario, all regimes."""
    scenario = random_small_scenario(seed, size_cap)
    errors = []
    for regime in ALL_REGIMES:
        graph = build_graph(scenario, regime)
        cost = graph.cost
        if fault:
            rng = np.random.default_rng([seed, 99])
            cost = cost * (1.0 + fault * rng.random(cost.shape))
        found = kernels.dense_dijkstra(cost, graph.index(scenario.source), graph.index(scenario.dest))
        bf = brute_force_route(scenario, regime)
        if found is None:
            errors.append(f"routing seed={seed} regime={regime}: Dijkstra found no route")
            continue
        nodes = [graph.node_ids[i] for i in found[0]]
        dj_cost = graph.path_cost(nodes)
        if _rel(dj_cost, bf.best.path_cost) > ROUTING_RTOL:
            errors.append(
                f"routing seed={seed} regime={regime}: dijkstra cost {dj_cost!r} "
                f"!= brute force {bf.best.path_cost!r}"
            )
        if _rel(
            _metric_of(bf.best.plan), bf.best_metric
        ) > ROUTING_RTOL:
            errors.append(
                f"routing seed={seed} regime={regime}: min-cost path does not optimize "
                f"the end-to-end metric"
            )
    return errors


def _metric_of(plan) -> float:
    if plan.regime.max_throughput:
        return math.inf if plan.unconstrained else plan.rate_coeff
    return plan.delay_total


def random_exposures(rng, max_hops: int = 6) -> np.ndarray:
    hops = int(rng.integers(1, max_hops + 1))
    return 10.0 ** rng.uniform(-3.0, 3.0, size=hops)


def check_allocation_case(seed: int) -> list[str]:
    rng = np.random.default_rng([seed, 11])
    omega = random_exposures(rng)
    delta = float(rng.uniform(0.01, 0.1))
    errors = []
    for regime in ALL_REGIMES:
        cf = closed_form(regime, omega, delta)
        nm = numeric_oracle(regime, omega, delta)
        a, b = (cf.rate_coeff, nm.rate_coeff) if regime.max_throughput else (
            cf.delay_total, nm.delay_total)
        if _rel(a, b) > ALLOCATION_RTOL:
            errors.append(
                f"allocation seed={seed} regime={regime}: closed form {a!r} != oracle {b!r}"
            )
    return errors


def random_sk_setup(rng, max_hops: int = 5, max_wardens: int = 5):
    """Powers, per-warden channel gains and warden noises with loads of order 1e-3..1."""
    h = int(rng.integers(1, max_hops + 1))
    m = int(rng.integers(1, max_wardens + 1))
    powers = 10.0 ** rng.uniform(-3.0, 0.0, size=h)
    gains = 10.0 ** rng.uniform(-2.0, 0.0, size=(h, m))
    noise = 10.0 ** rng.uniform(-0.5, 0.5, size=m)
    n = int(rng.choice([1, 10, 1000, 10**4, 10**6]))
    return powers, gains, noise, n


def check_kl_case(seed: int) -> list[str]:
    rng = np.random.default_rng([seed, 13])
    powers, gains, noise, n = random_sk_setup(rng)
    terms = powers[:, None] * gains / noise[None, :]
    fast = exact_kl_sk(terms, n)
    slow = kl_gaussian_oracle(sk_gaussian_pair(powers, gains, noise, n))
    if _rel(fast, slow) > KL_RTOL:
        return [f"kl seed={seed}: scalar {fast!r} != matrix oracle {slow!r}"]
    return []


def run_verify(seed: int = 0, cases: int = 50, size_cap: int = 8,
               fault: float = 0.0) -> list[SuiteReport]:
    if not 2 <= size_cap <= BRUTE_FORCE_MAX_NODES:
        raise ValueError(f"size cap must be between 2 and {BRUTE_FORCE_MAX_NODES}")
    if cases < 1:
        raise ValueError("cases must be >= 1")
    reports = [SuiteReport("routing", cases), SuiteReport("allocation", cases),
               SuiteReport("kl", cases)]
    for case in range(cases):
        s = seed + case
        reports[0].failures += check_routing_case(s, size_cap, fault)
        reports[1].failures += check_allocation_case(s)
        reports[2].failures += check_kl_case(s)
    return reports
