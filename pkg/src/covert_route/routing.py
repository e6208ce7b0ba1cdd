"""Route selection: regime-specific link costs, Dijkstra, and a brute-force oracle.

Every regime's end-to-end metric is a monotone function of an additive
path cost, so the optimal path is a shortest path under the matching
per-link cost:

=======  ===================  =====================================
regime   link cost            end-to-end metric
=======  ===================  =====================================
MT-SK    omega                rate  = sqrt(delta) / cost
MD-SK    omega ** (1/2)       delay = cost**2 / sqrt(delta)
MT-IK    omega ** 2           rate  = sqrt(delta) / sqrt(cost)
MD-IK    omega ** (2/3)       delay = cost**(3/2) / sqrt(delta)
=======  ===================  =====================================

Ties between equal-cost paths go to fewer hops, then to the
lexicographically smallest node-id sequence.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .allocation import Path, PathPlan, Regime, allocate, path_metric
from .covertness import CovertBudget, LinkExposure, exposure_matrix
from .scenario import Scenario

BRUTE_FORCE_MAX_NODES = 12


class NoRouteError(RuntimeError):
    """Destination unreachable over finite-cost links."""


def link_cost(omega, regime: Regime):
    """Per-link routing cost for ``regime``; works elementwise on arrays."""
    if isinstance(omega, LinkExposure):
        omega = omega.omega
    regime = Regime(regime)
    w = np.asarray(omega, dtype=float)
    if regime is Regime.MT_SK:
        out = w.copy()
    elif regime is Regime.MD_SK:
        out = np.sqrt(w)
    elif regime is Regime.MT_IK:
        out = w * w
    else:
        out = np.cbrt(w) ** 2
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class CostedGraph:
    """Dense directed cost matrix over the scenario's nodes (``inf`` = no link)."""

    node_ids: tuple[int, ...]
    cost: np.ndarray
    regime: Regime | None = None
    omega: np.ndarray | None = None

    @property
    def n_nodes(self) -> int:
        return len(self.node_ids)

    def index(self, node_id: int) -> int:
        try:
            return self._lookup[node_id]
        except AttributeError:
            object.__setattr__(self, "_lookup", {v: i for i, v in enumerate(self.node_ids)})
            return self._lookup[node_id]

    def finite_links(self) -> int:
        return int(np.count_nonzero(np.isfinite(self.cost)))

    def path_cost(self, nodes) -> float:
        """Left-to-right sum of link costs, the same order Dijkstra accumulates in."""
        idx = [self.index(v) for v in nodes]
        total = 0.0
        for i, j in zip(idx[:-1], idx[1:]):
            total += float(self.cost[i, j])
        return total


def build_graph(scenario: Scenario, regime: Regime, omega: np.ndarray | None = None) -> CostedGraph:
    """Cost every ordered node pair; the graph is complete apart from self loops."""
    if omega is None:
        omega = exposure_matrix(scenario)
    ids = scenario.ids()
    # rows sorted by node id so index order is id order for tie-breaking
    order = sorted(range(len(ids)), key=ids.__getitem__)
    if order != list(range(len(ids))):
        omega = omega[np.ix_(order, order)]
    cost = link_cost(omega, regime)
    np.fill_diagonal(cost, math.inf)
    return CostedGraph(tuple(ids[i] for i in order), cost, Regime(regime), omega)


def shortest_path(graph: CostedGraph, source: int, dest: int) -> tuple[Path, float]:
    result = kernels.dense_dijkstra(graph.cost, graph.index(source), graph.index(dest))
    if result is None:
        raise NoRouteError(f"no finite-cost route from {source} to {dest}")
    idx, total = result
    return Path(tuple(graph.node_ids[i] for i in idx)), float(total)


@dataclass(frozen=True)
class RouteResult:
    regime: Regime
    path: Path
    path_cost: float
    plan: PathPlan

    @property
    def rate_coeff(self) -> float | None:
        return self.plan.rate_coeff

    @property
    def delay_coeff(self) -> float:
        return self.plan.delay_total


def route(scenario: Scenario, budget: CovertBudget, regime: Regime,
          omega: np.ndarray | None = None) -> RouteResult:
    """Minimum-cost path under ``regime`` plus its optimal power allocation."""
    regime = Regime(regime)
    if omega is None:
        omega = exposure_matrix(scenario)
    graph = build_graph(scenario, regime, omega)
    path, cost = shortest_path(graph, scenario.source, scenario.dest)
    plan = allocate(regime, path, scenario, budget, omega_matrix=omega)
    return RouteResult(regime, path, cost, plan)


def route_all(scenario: Scenario, budget: CovertBudget, regimes=None) -> dict[Regime, RouteResult]:
    """Route every regime sharing one exposure matrix."""
    omega = exposure_matrix(scenario)
    regimes = regimes or (Regime.MT_SK, Regime.MD_SK, Regime.MT_IK, Regime.MD_IK)
    return {Regime(r): route(scenario, budget, r, omega) for r in regimes}


def direct_link(scenario: Scenario, budget: CovertBudget, regime: Regime) -> RouteResult:
    """The single-hop Alice-to-Bob plan, the baseline every route must match or beat."""
    regime = Regime(regime)
    path = Path((scenario.source, scenario.dest))
    omega = exposure_matrix(scenario)
    graph = build_graph(scenario, regime, omega)
    plan = allocate(regime, path, scenario, budget, omega_matrix=omega)
    return RouteResult(regime, path, graph.path_cost(path.nodes), plan)


# -- brute-force oracle -------------------------------------------------------


def enumerate_paths(graph: CostedGraph, source: int, dest: int):
    """Yield every simple ``source -> dest`` path over finite-cost links as row indices."""
    s, t = graph.index(source), graph.index(dest)
    relays = [i for i in range(graph.n_nodes) if i not in (s, t)]
    finite = np.isfinite(graph.cost).tolist()
    for k in range(len(relays) + 1):
        for mid in itertools.permutations(relays, k):
            idx = (s, *mid, t)
            if all(finite[i][j] for i, j in zip(idx[:-1], idx[1:])):
                yield idx


@dataclass(frozen=True)
class BruteForceResult:
    best: RouteResult
    #: path maximizing the closed-form rate (MT) or minimizing delay (MD)
    best_by_metric: Path
    best_metric: float
    paths_checked: int


def brute_force_route(scenario: Scenario, regime: Regime,
                      budget: CovertBudget | None = None) -> BruteForceResult:
    """Exhaustive search over all simple paths; exponential, for small scenarios only.

    Ranks paths twice: by additive cost (with the router's tie-breaking) and
    by the closed-form end-to-end metric.  The two winners should coincide.
    """
    if scenario.n_nodes > BRUTE_FORCE_MAX_NODES:
        raise ValueError(
            f"brute force is limited to {BRUTE_FORCE_MAX_NODES} nodes, got {scenario.n_nodes}"
        )
    regime = Regime(regime)
    budget = budget or CovertBudget(1.0)
    omega = exposure_matrix(scenario)
    graph = build_graph(scenario, regime, omega)
    ids = graph.node_ids
    cost_rows = graph.cost.tolist()
    omega_rows = graph.omega.tolist()
    best_key = None
    metric_key = None
    count = 0
    sign = -1.0 if regime.max_throughput else 1.0
    for idx in enumerate_paths(graph, scenario.source, scenario.dest):
        count += 1
        cost = 0.0
        for i, j in zip(idx[:-1], idx[1:]):
            cost += cost_rows[i][j]
        nodes = tuple(ids[i] for i in idx)
        key = (cost, len(nodes), nodes)
        if best_key is None or key < best_key:
            best_key = key
        metric = path_metric(regime, [omega_rows[i][j] for i, j in zip(idx[:-1], idx[1:])],
                             budget.delta)
        mkey = (sign * metric, len(nodes), nodes)
        if metric_key is None or mkey < metric_key:
            metric_key = mkey
    if best_key is None:
        raise NoRouteError(f"no finite-cost route from {scenario.source} to {scenario.dest}")
    path = Path(best_key[2])
    plan = allocate(regime, path, scenario, budget, omega_matrix=omega)
    return BruteForceResult(
        RouteResult(regime, path, best_key[0], plan),
        Path(metric_key[2]),
        sign * metric_key[0],
        count,
    )
