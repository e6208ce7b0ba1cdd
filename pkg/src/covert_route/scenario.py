"""Network geometry: system nodes, wardens, scenario files and random placement.

Node ids are dense integers.  Generated scenarios put Alice at id 0 (the
origin), Bob at id 1 (the far corner ``(d, d)``) and relays at ids 2, 3, ...
so that growing the relay count never renumbers existing nodes.
"""
from __future__ import annotations

import json
import logging
import math
import os
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

log = logging.getLogger(__name__)

ALICE = 0
BOB = 1

#: Stream labels mixed into the seed so relays and wardens come from
#: independent substreams (nested sets stay nested when either count changes).
_RELAY_STREAM = 0
_WARDEN_STREAM = 1


class ScenarioError(ValueError):
    """Raised for malformed or invariant-violating scenarios."""


@dataclass(frozen=True)
class Point:
    x: float
    y: float


@dataclass(frozen=True)
class SystemNode:
    id: int
    position: Point
    noise_var: float


@dataclass(frozen=True)
class Warden:
    position: Point
    noise_var: float


def distance(a: Point, b: Point) -> float:
    """Euclidean distance between two points."""
    return math.hypot(a.x - b.x, a.y - b.y)


@dataclass(frozen=True)
class Scenario:
    """Immutable network snapshot.

    ``nodes`` holds every system node (Alice and Bob included); ``source``
    and ``dest`` are node ids.  Construction validates all invariants.
    """

    dimension: float
    alpha: float
    nodes: tuple[SystemNode, ...]
    wardens: tuple[Warden, ...]
    source: int
    dest: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "wardens", tuple(self.wardens))
        _validate(self)
        if not self.wardens:
            log.info("scenario has no wardens; every link cost is zero")

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def has_wardens(self) -> bool:
        return bool(self.wardens)

    def index_of(self, node_id: int) -> int:
        """Row index of ``node_id`` in :meth:`arrays` output."""
        try:
            return self._index[node_id]
        except AttributeError:
            object.__setattr__(
                self, "_index", {n.id: i for i, n in enumerate(self.nodes)}
            )
            return self._index[node_id]

    def node(self, node_id: int) -> SystemNode:
        return self.nodes[self.index_of(node_id)]

    def arrays(self):
        """Return ``(node_xy, node_noise, warden_xy, warden_noise)`` arrays."""
        node_xy = np.array(
            [(n.position.x, n.position.y) for n in self.nodes], dtype=float
        ).reshape(-1, 2)
        node_noise = np.array([n.noise_var for n in self.nodes], dtype=float)
        warden_xy = np.array(
            [(w.position.x, w.position.y) for w in self.wardens], dtype=float
        ).reshape(-1, 2)
        warden_noise = np.array([w.noise_var for w in self.wardens], dtype=float)
        return node_xy, node_noise, warden_xy, warden_noise

    def ids(self) -> list[int]:
        return [n.id for n in self.nodes]


def _finite(v: float, what: str) -> None:
    if not math.isfinite(v):
        raise ScenarioError(f"{what} must be finite, got {v!r}")


def _validate(s: Scenario) -> None:
    _finite(s.dimension, "dimension")
    if s.dimension <= 0:
        raise ScenarioError("dimension must be > 0")
    _finite(s.alpha, "alpha")
    if s.alpha < 2:
        raise ScenarioError(f"alpha < 2 (got {s.alpha})")
    seen_ids: set[int] = set()
    seen_pos: set[tuple[float, float]] = set()
    for node in s.nodes:
        if isinstance(node.id, bool) or not isinstance(node.id, (int, np.integer)):
            raise ScenarioError(f"node id must be an integer, got {node.id!r}")
        if node.id < 0:
            raise ScenarioError(f"node id must be non-negative, got {node.id}")
        if node.id in seen_ids:
            raise ScenarioError(f"duplicate node id {node.id}")
        seen_ids.add(node.id)
        _finite(node.position.x, f"nodes[{node.id}].x")
        _finite(node.position.y, f"nodes[{node.id}].y")
        pos = (node.position.x, node.position.y)
        if pos in seen_pos:
            raise ScenarioError(f"nodes[{node.id}] shares its position with another node")
        seen_pos.add(pos)
        _finite(node.noise_var, f"nodes[{node.id}].noise_var")
        if node.noise_var <= 0:
            raise ScenarioError(f"nodes[{node.id}].noise_var must be > 0")
    for k, w in enumerate(s.wardens):
        _finite(w.position.x, f"wardens[{k}].x")
        _finite(w.position.y, f"wardens[{k}].y")
        _finite(w.noise_var, f"wardens[{k}].noise_var")
        if w.noise_var <= 0:
            raise ScenarioError(f"wardens[{k}].noise_var must be > 0")
    if s.source == s.dest:
        raise ScenarioError("source and dest must differ")
    for name, nid in (("source", s.source), ("dest", s.dest)):
        if nid not in seen_ids:
            raise ScenarioError(f"{name} {nid} is not a node id")


def _uniform_points(seed: int, stream: int, count: int, dimension: float) -> np.ndarray:
    # PCG64 seeded through SeedSequence; Generator.random() scales the top
    # 53 bits of each 64-bit draw, so no rejection step is involved.
    gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, stream])))
    return gen.random((count, 2)) * dimension


def generate_random(
    seed: int,
    n_nodes: int,
    n_wardens: int,
    dimension: float = 100.0,
    alpha: float = 3.0,
    node_noise: float = 1.0,
    warden_noise: float = 1.0,
) -> Scenario:
    """Uniform random placement on ``[0, d]^2`` with Alice/Bob at opposite corners.

    Relays and wardens are drawn from separate PCG64 substreams of ``seed``;
    the first ``k`` relays (wardens) of a larger draw equal a draw of ``k``.
    """
    if n_nodes < 0 or n_wardens < 0:
        raise ScenarioError("node and warden counts must be non-negative")
    if not (math.isfinite(dimension) and dimension > 0):
        raise ScenarioError("dimension must be > 0")
    if seed < 0:
        raise ScenarioError("seed must be non-negative")
    relay_xy = _uniform_points(seed, _RELAY_STREAM, n_nodes, dimension)
    warden_xy = _uniform_points(seed, _WARDEN_STREAM, n_wardens, dimension)
    nodes = [
        SystemNode(ALICE, Point(0.0, 0.0), float(node_noise)),
        SystemNode(BOB, Point(float(dimension), float(dimension)), float(node_noise)),
    ]
    nodes += [
        SystemNode(2 + i, Point(float(x), float(y)), float(node_noise))
        for i, (x, y) in enumerate(relay_xy)
    ]
    wardens = [Warden(Point(float(x), float(y)), float(warden_noise)) for x, y in warden_xy]
    return Scenario(float(dimension), float(alpha), tuple(nodes), tuple(wardens), ALICE, BOB)


def with_wardens(scenario: Scenario, wardens: Iterable[Warden]) -> Scenario:
    """Copy of ``scenario`` with a different warden set."""
    return Scenario(
        scenario.dimension, scenario.alpha, scenario.nodes, tuple(wardens),
        scenario.source, scenario.dest,
    )


# -- file format ---------------------------------------------------------


def to_dict(scenario: Scenario) -> dict:
    return {
        "dimension": scenario.dimension,
        "alpha": scenario.alpha,
        "source": scenario.source,
        "dest": scenario.dest,
        "nodes": [
            {"id": n.id, "x": n.position.x, "y": n.position.y, "noise_var": n.noise_var}
            for n in scenario.nodes
        ],
        "wardens": [
            {"x": w.position.x, "y": w.position.y, "noise_var": w.noise_var}
            for w in scenario.wardens
        ],
    }


def _field(obj: dict, key: str, where: str):
    if not isinstance(obj, dict):
        raise ScenarioError(f"{where}: expected an object")
    if key not in obj:
        raise ScenarioError(f"{where}: missing field {key!r}")
    return obj[key]


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _integer(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioError(f"{where}: expected an integer, got {value!r}")
    return value


def from_dict(data: dict) -> Scenario:
    """Build a validated :class:`Scenario` from the JSON document model."""
    if not isinstance(data, dict):
        raise ScenarioError("scenario document must be a JSON object")
    nodes_raw = _field(data, "nodes", "scenario")
    wardens_raw = _field(data, "wardens", "scenario")
    if not isinstance(nodes_raw, list) or not isinstance(wardens_raw, list):
        raise ScenarioError("scenario: 'nodes' and 'wardens' must be arrays")
    nodes = []
    for i, raw in enumerate(nodes_raw):
        where = f"nodes[{i}]"
        nodes.append(
            SystemNode(
                _integer(_field(raw, "id", where), f"{where}.id"),
                Point(
                    _number(_field(raw, "x", where), f"{where}.x"),
                    _number(_field(raw, "y", where), f"{where}.y"),
                ),
                _number(_field(raw, "noise_var", where), f"{where}.noise_var"),
            )
        )
    wardens = []
    for k, raw in enumerate(wardens_raw):
        where = f"wardens[{k}]"
        wardens.append(
            Warden(
                Point(
                    _number(_field(raw, "x", where), f"{where}.x"),
                    _number(_field(raw, "y", where), f"{where}.y"),
                ),
                _number(_field(raw, "noise_var", where), f"{where}.noise_var"),
            )
        )
    return Scenario(
        dimension=_number(_field(data, "dimension", "scenario"), "dimension"),
        alpha=_number(_field(data, "alpha", "scenario"), "alpha"),
        nodes=tuple(nodes),
        wardens=tuple(wardens),
        source=_integer(_field(data, "source", "scenario"), "source"),
        dest=_integer(_field(data, "dest", "scenario"), "dest"),
    )


def dumps(scenario: Scenario) -> str:
    # json writes floats with repr(), which round-trips binary64 exactly.
    return json.dumps(to_dict(scenario), indent=2) + "\n"


def loads(text: str) -> Scenario:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"parse error: {exc}") from exc
    return from_dict(data)


def save(scenario: Scenario, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(scenario))


def load(path: str | os.PathLike) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def make_scenario(
    node_xy: Sequence[tuple[float, float]],
    warden_xy: Sequence[tuple[float, float]] = (),
    *,
    alpha: float = 2.0,
    node_noise: float | Sequence[float] = 1.0,
    warden_noise: float | Sequence[float] = 1.0,
    source: int = 0,
    dest: int | None = None,
    dimension: float | None = None,
) -> Scenario:
    """Convenience constructor: node ``i`` gets id ``i``; dest defaults to the last node."""
    n, m = len(node_xy), len(warden_xy)
    nn = [float(node_noise)] * n if np.isscalar(node_noise) else [float(v) for v in node_noise]
    wn = [float(warden_noise)] * m if np.isscalar(warden_noise) else [float(v) for v in warden_noise]
    if dimension is None:
        coords = [abs(c) for p in list(node_xy) + list(warden_xy) for c in p]
        dimension = max(coords + [1.0])
    nodes = tuple(
        SystemNode(i, Point(float(x), float(y)), nn[i]) for i, (x, y) in enumerate(node_xy)
    )
    wardens = tuple(Warden(Point(float(x), float(y)), wn[k]) for k, (x, y) in enumerate(warden_xy))
    return Scenario(
        float(dimension), float(alpha), nodes, wardens, source, n - 1 if dest is None else dest
    )
