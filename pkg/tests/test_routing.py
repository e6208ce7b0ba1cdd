import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from covert_route.allocation import ALL_REGIMES, Path, Regime
from covert_route.covertness import CovertBudget, LinkExposure, exposure_matrix
from covert_route.routing import (
    CostedGraph, NoRouteError, brute_force_route, build_graph, direct_link,
    enumerate_paths, link_cost, route, route_all, shortest_path,
)
from covert_route.scenario import (
    Point, Scenario, SystemNode, Warden, generate_random, make_scenario, with_wardens,
)

INF = math.inf


@pytest.mark.parametrize("omega,regime,expected", [
    (4.0, Regime.MD_SK, 2.0), (3.0, Regime.MT_IK, 9.0), (8.0, Regime.MD_IK, 4.0),
    (5.0, Regime.MT_SK, 5.0),
])
def test_link_cost_examples(omega, regime, expected):
    assert link_cost(omega, regime) == pytest.approx(expected, rel=1e-15)
    assert link_cost(LinkExposure(omega), regime) == pytest.approx(expected, rel=1e-15)


def test_link_cost_vectorized():
    out = link_cost(np.array([0.0, 1.0, INF]), Regime.MD_IK)
    assert out[0] == 0.0 and out[1] == 1.0 and math.isinf(out[2])


def test_hand_checked_graph():
    g = CostedGraph((0, 1, 2), np.array([[INF, 1.0, 2.5], [INF, INF, 1.0], [INF, INF, INF]]))
    path, cost = shortest_path(g, 0, 2)
    assert path.nodes == (0, 1, 2) and cost == 2.0


def test_forced_direct_route():
    g = CostedGraph((0, 1, 2), np.array([[INF, INF, 5.0], [INF, INF, INF], [INF, INF, INF]]))
    path, cost = shortest_path(g, 0, 2)
    assert path.nodes == (0, 2) and cost == 5.0


def test_unreachable_destination():
    g = CostedGraph((0, 1, 2), np.array([[INF, 1.0, INF], [INF, INF, INF], [INF, INF, INF]]))
    with pytest.raises(NoRouteError):
        shortest_path(g, 0, 2)


def test_tie_prefers_fewer_hops_then_smaller_ids():
    # 0->2 direct costs 2; 0->1->2 and 0->3->2 each cost 2 as well
    c = np.full((4, 4), INF)
    c[0, 2] = 2.0
    c[0, 1] = c[1, 2] = 1.0
    c[0, 3] = c[3, 2] = 1.0
    assert shortest_path(CostedGraph((0, 1, 2, 3), c), 0, 2)[0].nodes == (0, 2)
    c[0, 2] = INF
    assert shortest_path(CostedGraph((0, 1, 2, 3), c), 0, 2)[0].nodes == (0, 1, 2)


def test_zero_wardens_gives_direct_link():
    s = generate_random(3, 5, 0)
    for regime in ALL_REGIMES:
        res = route(s, CovertBudget(0.05), regime)
        assert res.path.nodes == (0, 1)
        assert res.plan.unconstrained
        assert res.rate_coeff is None


def test_two_node_scenario_routes_directly():
    s = generate_random(3, 0, 4)
    for res in route_all(s, CovertBudget(0.05)).values():
        assert res.path.nodes == (0, 1)


def test_graph_link_count():
    s = generate_random(1, 6, 3)
    g = build_graph(s, Regime.MT_SK)
    n = s.n_nodes
    assert g.finite_links() == n * (n - 1)
    assert np.all(np.isinf(np.diag(g.cost)))


def test_noise_scaling_leaves_costs_unchanged():
    a = generate_random(4, 6, 4, node_noise=1.0, warden_noise=1.0)
    b = generate_random(4, 6, 4, node_noise=7.5, warden_noise=7.5)
    for regime in ALL_REGIMES:
        ca, cb = build_graph(a, regime).cost, build_graph(b, regime).cost
        np.testing.assert_allclose(ca, cb, rtol=1e-14)
        assert route(a, CovertBudget(0.05), regime).path == route(b, CovertBudget(0.05), regime).path


def test_adding_warden_never_decreases_cost():
    s = generate_random(9, 6, 3)
    t = with_wardens(s, s.wardens + (Warden(Point(40.0, 60.0), 1.0),))
    for regime in ALL_REGIMES:
        assert np.all(build_graph(t, regime).cost >= build_graph(s, regime).cost)
        rs, rt = route(s, CovertBudget(0.05), regime), route(t, CovertBudget(0.05), regime)
        if regime.max_throughput:
            assert rt.rate_coeff <= rs.rate_coeff
        else:
            assert rt.delay_coeff >= rs.delay_coeff


def test_path_invariant_to_delta():
    s = generate_random(12, 10, 10)
    for regime in ALL_REGIMES:
        assert route(s, CovertBudget(0.01), regime).path == route(s, CovertBudget(0.1), regime).path


def test_colocated_warden_on_relay_is_avoided():
    s = make_scenario([(0, 0), (5, 0), (10, 0)], [(5, 0)], alpha=2)
    for regime in ALL_REGIMES:
        res = route(s, CovertBudget(0.05), regime)
        assert res.path.nodes == (0, 2)


def test_warden_on_source_has_no_route():
    s = make_scenario([(0, 0), (5, 0), (10, 0)], [(0, 0)], alpha=2)
    with pytest.raises(NoRouteError):
        route(s, CovertBudget(0.05), Regime.MT_SK)


def test_route_beats_direct_link():
    for seed in range(20):
        s = generate_random(seed, 15, 10)
        for regime in ALL_REGIMES:
            best, base = route(s, CovertBudget(0.05), regime), direct_link(s, CovertBudget(0.05), regime)
            if regime.max_throughput:
                assert best.rate_coeff >= base.rate_coeff
            else:
                assert best.delay_coeff <= base.delay_coeff


def test_enumeration_counts_all_simple_paths():
    s = generate_random(2, 3, 1)  # 5 nodes, 3 relays
    g = build_graph(s, Regime.MT_SK)
    # sum over k of 3!/(3-k)! = 1 + 3 + 6 + 6
    assert len(list(enumerate_paths(g, 0, 1))) == 16


def test_brute_force_small_example():
    s = generate_random(6, 4, 3)  # N = 6
    for regime in ALL_REGIMES:
        bf = brute_force_route(s, regime)
        path, cost = shortest_path(build_graph(s, regime), 0, 1)
        assert bf.best.path == path and bf.best.path_cost == cost
        assert bf.best_by_metric == path


def test_brute_force_size_limit():
    with pytest.raises(ValueError):
        brute_force_route(generate_random(0, 12, 1), Regime.MT_SK)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31), st.integers(0, 6), st.integers(1, 5),
       st.sampled_from([2.0, 2.5, 3.0, 4.0]))
def test_dijkstra_equals_brute_force(seed, relays, wardens, alpha):
    s = generate_random(seed, relays, wardens, 100.0, alpha)
    for regime in ALL_REGIMES:
        bf = brute_force_route(s, regime)
        path, cost = shortest_path(build_graph(s, regime), s.source, s.dest)
        assert cost == bf.best.path_cost
        assert path == bf.best.path


def test_graph_rows_sorted_by_id():
    nodes = (SystemNode(5, Point(1, 1), 1.0), SystemNode(0, Point(0, 0), 1.0),
             SystemNode(9, Point(3, 3), 1.0))
    s = Scenario(10.0, 2.0, nodes, (Warden(Point(2, 0), 1.0),), 0, 9)
    g = build_graph(s, Regime.MT_SK)
    assert g.node_ids == (0, 5, 9)
    assert route(s, CovertBudget(0.05), Regime.MT_SK).path.nodes[0] == 0
