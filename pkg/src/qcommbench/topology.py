"""Device coupling graphs, shortest-path routing, and SWAP-chain synthesis.

A device graph is a set of named qubits plus directed edges giving the native
CNOT orientations.  Routing works on the undirected skeleton; direction only
matters when gates are synthesised, where a missing orientation costs four
Hadamards around the reversed CNOT (see :mod:`.circuits`).
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .circuits import Gate, decompose_swap


@dataclass(frozen=True)
class DeviceGraph:
    """Named qubits and directed native-CNOT edges of one device."""

    name: str
    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    description: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))
        if len(set(self.nodes)) != len(self.nodes):
            raise ValueError("duplicate node labels")
        seen = set()
        for c, t in self.edges:
            if c not in self.nodes or t not in self.nodes:
                raise ValueError(f"edge ({c},{t}) references unknown node")
            if c == t:
                raise ValueError(f"self-loop on {c}")
            if (c, t) in seen:
                raise ValueError(f"duplicate edge ({c},{t})")
            seen.add((c, t))
        if len(self.nodes) > 1 and not self._connected():
            raise ValueError("device graph is not connected")

    def _connected(self) -> bool:
        reached = {self.nodes[0]}
        frontier = deque([self.nodes[0]])
        while frontier:
            for nxt in self.neighbors(frontier.popleft()):
                if nxt not in reached:
                    reached.add(nxt)
                    frontier.append(nxt)
        return len(reached) == len(self.nodes)

    def neighbors(self, qubit: str) -> tuple[str, ...]:
        """Undirected neighbours, sorted for deterministic traversal."""
        out = {t for c, t in self.edges if c == qubit}
        out |= {c for c, t in self.edges if t == qubit}
        return tuple(sorted(out))

    def cnot_orientation(self, a: str, b: str) -> str | None:
        """Native orientation(s) between a pair: 'both', 'a->b', 'b->a', or None."""
        fwd = (a, b) in self.edges
        rev = (b, a) in self.edges
        if fwd and rev:
            return "both"
        if fwd:
            return "a->b"
        if rev:
            return "b->a"
        return None

    def require_adjacent(self, a: str, b: str) -> str:
        orient = self.cnot_orientation(a, b)
        if orient is None:
            raise ValueError(f"qubits {a!r} and {b!r} are not coupled on {self.name}")
        return orient


def find_path(graph: DeviceGraph, src: str, dst: str) -> tuple[str, ...]:
    """Shortest undirected path by BFS; ties resolve to the lexicographically
    earliest predecessor, so the result is deterministic."""
    for q in (src, dst):
        if q not in graph.nodes:
            raise ValueError(f"unknown qubit {q!r} on {graph.name}")
    if src == dst:
        return (src,)
    parent: dict[str, str] = {src: src}
    frontier = deque([src])
    while frontier:
        node = frontier.popleft()
        for nxt in graph.neighbors(node):
            if nxt not in parent:
                parent[nxt] = node
                if nxt == dst:
                    path = [dst]
                    while path[-1] != src:
                        path.append(parent[path[-1]])
                    return tuple(reversed(path))
                frontier.append(nxt)
    raise ValueError(f"no path from {src!r} to {dst!r} on {graph.name}")


@dataclass(frozen=True)
class RoutePlan:
    """An outbound walk and a return walk for a travelling payload qubit.

    Both walks are node sequences; the return starts where the outbound ends.
    A singleton walk means no movement.  One SWAP per hop, so
    ``num_swaps = (len(outbound)-1) + (len(return_path)-1)``.
    """

    outbound: tuple[str, ...]
    return_path: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "outbound", tuple(self.outbound))
        object.__setattr__(self, "return_path", tuple(self.return_path))
        if not self.outbound or not self.return_path:
            raise ValueError("route walks must contain at least the resting node")
        if self.return_path[0] != self.outbound[-1]:
            raise ValueError("return walk must start where the outbound walk ends")
        for walk in (self.outbound, self.return_path):
            if len(set(walk)) != len(walk):
                raise ValueError(f"walk revisits a node: {walk!r}")

    @property
    def start(self) -> str:
        return self.outbound[0]

    @property
    def end(self) -> str:
        return self.return_path[-1]

    @property
    def num_swaps(self) -> int:
        return (len(self.outbound) - 1) + (len(self.return_path) - 1)

    def validate_against(self, graph: DeviceGraph) -> None:
        for walk in (self.outbound, self.return_path):
            for a, b in zip(walk, walk[1:]):
                graph.require_adjacent(a, b)

    @classmethod
    def stationary(cls, qubit: str) -> "RoutePlan":
        return cls((qubit,), (qubit,))


def alternate_return_path(
    graph: DeviceGraph, outbound: tuple[str, ...], home: str
) -> tuple[str, ...]:
    """Return walk that avoids the outbound nodes and ends next to `home`.

    BFS from the outbound end through nodes not used on the way out, stopping
    at the first neighbour of `home` (other than the outbound start).  On a
    ladder-shaped device this walks the payload back along the opposite row.
    """
    if len(outbound) < 2:
        return (outbound[-1],)
    start = outbound[-1]
    blocked = set(outbound[:-1]) | {home}
    targets = set(graph.neighbors(home)) - set(outbound)
    if start in set(graph.neighbors(home)):
        return (start,)
    if not targets:
        raise ValueError(f"no return landing site next to {home!r} off the outbound walk")
    parent: dict[str, str] = {start: start}
    frontier = deque([start])
    while frontier:
        node = frontier.popleft()
        for nxt in graph.neighbors(node):
            if nxt in parent or nxt in blocked:
                continue
            parent[nxt] = node
            if nxt in targets:
                path = [nxt]
                while path[-1] != start:
                    path.append(parent[path[-1]])
                return tuple(reversed(path))
            frontier.append(nxt)
    raise ValueError(f"no disjoint return walk from {start!r} towards {home!r}")


def plan_route(
    graph: DeviceGraph,
    start: str,
    hops: int,
    home: str,
    return_mode: str = "same",
    base_path: tuple[str, ...] | None = None,
) -> RoutePlan:
    """Build the round trip for a sweep point: `hops` steps out, then back.

    The outbound walk follows `base_path` (default: the shortest path from
    `start` to the farthest node along it; supply one to pin the row walked).
    `return_mode` is "same" (retrace the outbound walk) or "alternate"
    (node-disjoint walk ending adjacent to `home`, see
    :func:`alternate_return_path`).
    """
    if hops < 0:
        raise ValueError("hops must be non-negative")
    if hops == 0:
        return RoutePlan.stationary(start)
    if base_path is None:
        raise ValueError("base_path is required when hops > 0")
    if base_path[0] != start:
        raise ValueError("base_path must begin at the payload start")
    if hops > len(base_path) - 1:
        raise ValueError(f"base path supports at most {len(base_path) - 1} hops, got {hops}")
    outbound = tuple(base_path[: hops + 1])
    if return_mode == "same":
        ret = tuple(reversed(outbound))
    elif return_mode == "alternate":
        ret = alternate_return_path(graph, outbound, home)
    else:
        raise ValueError(f"unknown return mode {return_mode!r}")
    plan = RoutePlan(outbound, ret)
    plan.validate_against(graph)
    return plan


def build_swap_chain(
    graph: DeviceGraph,
    walk: tuple[str, ...],
    durations: dict[str, float] | None = None,
) -> list[Gate]:
    """SWAP gates moving a payload along `walk`, one decomposed SWAP per hop.

    Each hop honours the native CNOT orientation of its pair.  The payload
    finishes on ``walk[-1]``.
    """
    gates: list[Gate] = []
    for a, b in zip(walk, walk[1:]):
        orient = graph.require_adjacent(a, b)
        gates.extend(decompose_swap(a, b, {"both": "both", "a->b": "a->b", "b->a": "b->a"}[orient], durations))
    return gates


def list_bundled_devices() -> list[str]:
    root = resources.files("qcommbench").joinpath("data/devices")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def device_from_dict(doc: dict) -> DeviceGraph:
    if not isinstance(doc, dict):
        raise ValueError("device document must be a JSON object")
    unknown = set(doc) - {"name", "nodes", "edges", "description"}
    if unknown:
        raise ValueError(f"unknown device document keys: {sorted(unknown)}")
    try:
        nodes = tuple(str(n) for n in doc["nodes"])
        edges = tuple((str(c), str(t)) for c, t in doc["edges"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed device document: {exc}") from exc
    return DeviceGraph(
        name=str(doc.get("name", "device")),
        nodes=nodes,
        edges=edges,
        description=str(doc.get("description", "")),
    )


def load_device(source: str | Path | dict) -> DeviceGraph:
    """Load a device graph from a bundled name, a JSON file path, or a dict."""
    if isinstance(source, dict):
        return device_from_dict(source)
    name = str(source)
    if not name.endswith(".json") and "/" not in name and "\\" not in name:
        ref = resources.files("qcommbench").joinpath(f"data/devices/{name}.json")
        if not ref.is_file():
            raise FileNotFoundError(
                f"no bundled device {name!r}; available: {list_bundled_devices()}"
            )
        return device_from_dict(json.loads(ref.read_text()))
    path = Path(source)
    if not path.exists():
        raise FileNotFoundError(f"device file {path} does not exist")
    return device_from_dict(json.loads(path.read_text()))
