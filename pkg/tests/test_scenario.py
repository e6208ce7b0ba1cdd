import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from covert_route.scenario import (
    Point, ScenarioError, distance, dumps, from_dict, generate_random, load,
    loads, make_scenario, save, to_dict, with_wardens, Warden,
)


@pytest.mark.parametrize("a,b,expected", [
    ((0, 0), (3, 4), 5.0),
    ((1, 1), (1, 1), 0.0),
    ((0, 0), (1, 1), math.sqrt(2)),
])
def test_distance_examples(a, b, expected):
    assert distance(Point(*a), Point(*b)) == pytest.approx(expected, rel=1e-15)


@given(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6), st.floats(-1e6, 1e6), st.floats(-1e6, 1e6))
def test_distance_symmetric(x1, y1, x2, y2):
    p, q = Point(x1, y1), Point(x2, y2)
    assert distance(p, q) == distance(q, p) >= 0


def test_generation_is_deterministic():
    a = generate_random(7, 5, 3, 100, 3, 1, 1)
    b = generate_random(7, 5, 3, 100, 3, 1, 1)
    assert a == b
    assert dumps(a) == dumps(b)


def test_empty_generation_has_only_endpoints():
    s = generate_random(7, 0, 0, 100, 3, 1, 1)
    assert s.ids() == [0, 1]
    assert s.wardens == ()
    assert s.node(0).position == Point(0.0, 0.0)
    assert s.node(1).position == Point(100.0, 100.0)


def test_positions_within_bounds_over_many_seeds():
    for seed in range(1000):
        s = generate_random(seed, 6, 4, 50.0)
        node_xy, _, warden_xy, _ = s.arrays()
        assert np.all((node_xy >= 0) & (node_xy <= 50.0))
        assert np.all((warden_xy >= 0) & (warden_xy < 50.0))


def test_counts_are_nested_prefixes():
    big = generate_random(3, 20, 20)
    small = generate_random(3, 5, 8)
    assert big.nodes[:7] == small.nodes
    assert big.wardens[:8] == small.wardens


def test_seeds_differ():
    assert generate_random(1, 5, 5) != generate_random(2, 5, 5)


@pytest.mark.parametrize("kwargs", [
    dict(dimension=0.0), dict(dimension=-1.0), dict(alpha=1.5), dict(alpha=math.nan),
])
def test_generate_rejects_bad_parameters(kwargs):
    with pytest.raises(ScenarioError):
        generate_random(0, 3, 3, **kwargs)


def test_save_load_round_trip(tmp_path):
    s = generate_random(11, 8, 4, 100, 2.7, 0.5, 2.0)
    path = tmp_path / "s.json"
    save(s, path)
    assert load(path) == s


def test_alpha_below_two_is_rejected():
    doc = to_dict(generate_random(0, 2, 2))
    doc["alpha"] = 1.5
    with pytest.raises(ScenarioError, match="alpha < 2"):
        loads(json.dumps(doc))


def test_duplicate_ids_are_rejected():
    doc = to_dict(generate_random(0, 3, 1))
    doc["nodes"][3]["id"] = doc["nodes"][2]["id"]
    with pytest.raises(ScenarioError, match="duplicate node id"):
        from_dict(doc)


@pytest.mark.parametrize("mutate,match", [
    (lambda d: d.pop("alpha"), "alpha"),
    (lambda d: d["nodes"][0].update(noise_var=0.0), "noise_var"),
    (lambda d: d["nodes"][0].update(x="far"), r"nodes\[0\]\.x"),
    (lambda d: d.update(dest=99), "dest"),
    (lambda d: d.update(source=1), "differ"),
    (lambda d: d["wardens"][0].update(noise_var=-1.0), "wardens"),
])
def test_field_level_errors(mutate, match):
    doc = to_dict(generate_random(0, 2, 2))
    mutate(doc)
    with pytest.raises(ScenarioError, match=match):
        from_dict(doc)


def test_malformed_json():
    with pytest.raises(ScenarioError, match="parse error"):
        loads("{not json")


def test_zero_wardens_permitted():
    s = make_scenario([(0, 0), (1, 1)])
    assert not s.has_wardens


def test_with_wardens_replaces_set():
    s = make_scenario([(0, 0), (1, 1)], [(5, 5)])
    w = Warden(Point(2, 2), 1.0)
    t = with_wardens(s, [w])
    assert t.wardens == (w,)
    assert t.nodes == s.nodes
