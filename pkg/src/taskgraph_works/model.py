"""Task graphs, workers, and structural metrics.

A task graph is a weighted DAG: every node carries a size (work units) and a
self-interdependency in [0, 1]; every edge ``(u, v)`` carries an
interdependency in [0, 1].  ``u`` is then a prerequisite of ``v``.
"""

from __future__ import annotations

import heapq
import json
import logging
import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Any

from .errors import (
    CycleDetected,
    DanglingEdge,
    DuplicateEdge,
    DuplicateNode,
    EmptyGraph,
    InvalidWorker,
    MissingExpertise,
    NonPositiveScale,
    NonPositiveSize,
    ParseError,
    SelfLoop,
    UnknownSubtask,
    WeightOutOfRange,
)

log = logging.getLogger(__name__)

SubtaskId = str
Edge = tuple[str, str]


@dataclass(frozen=True, eq=False)
class TaskGraph:
    """Validated, immutable task graph.  Build it with :func:`validate_graph`."""

    sizes: Mapping[str, float]
    self_dep: Mapping[str, float]
    edge_dep: Mapping[Edge, float]
    order: tuple[str, ...]
    _prereqs: Mapping[str, tuple[str, ...]] = field(repr=False)

    @property
    def nodes(self) -> tuple[str, ...]:
        """Nodes in cached topological order."""
        return self.order

    @property
    def edges(self) -> tuple[Edge, ...]:
        return tuple(sorted(self.edge_dep))

    @property
    def total_size(self) -> float:
        return math.fsum(self.sizes.values())

    def __contains__(self, v: object) -> bool:
        return v in self.sizes

    def __len__(self) -> int:
        return len(self.order)

    def prereqs(self, v: str) -> tuple[str, ...]:
        """The prerequisites of ``v`` in ascending id order."""
        try:
            return self._prereqs[v]
        except KeyError:
            raise UnknownSubtask(f"unknown subtask {v!r}") from None

    def require(self, v: str) -> None:
        if v not in self.sizes:
            raise UnknownSubtask(f"unknown subtask {v!r}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TaskGraph):
            return NotImplemented
        return (
            dict(self.sizes) == dict(other.sizes)
            and dict(self.self_dep) == dict(other.self_dep)
            and dict(self.edge_dep) == dict(other.edge_dep)
        )

    def __hash__(self) -> int:
        return hash((tuple(sorted(self.sizes.items())), tuple(sorted(self.edge_dep.items()))))


@dataclass(frozen=True)
class Worker:
    id: str
    time: float
    expertise: Mapping[str, float] = field(default_factory=dict)
    default_expertise: float = 1.0

    def __post_init__(self) -> None:
        if not self.time > 0:
            raise InvalidWorker(f"worker {self.id!r}: time must be positive, got {self.time}")
        if not self.default_expertise > 0:
            raise InvalidWorker(f"worker {self.id!r}: default expertise must be positive")
        for v, e in self.expertise.items():
            if not e > 0:
                raise InvalidWorker(f"worker {self.id!r}: expertise for {v!r} must be positive, got {e}")
        object.__setattr__(self, "expertise", MappingProxyType(dict(self.expertise)))

    def e(self, v: str) -> float:
        """Expertise multiplier on subtask ``v``."""
        return self.expertise.get(v, self.default_expertise)


class WorkerPool:
    """Ordered collection of workers with unique ids."""

    __slots__ = ("_workers", "_by_id")

    def __init__(self, workers: Iterable[Worker]) -> None:
        self._workers = tuple(workers)
        self._by_id: dict[str, Worker] = {}
        for w in self._workers:
            if w.id in self._by_id:
                raise InvalidWorker(f"duplicate worker id {w.id!r}")
            self._by_id[w.id] = w

    @classmethod
    def homogeneous(cls, n: int, time: float, expertise: float = 1.0, prefix: str = "w") -> WorkerPool:
        width = len(str(max(n - 1, 0)))
        return cls(
            Worker(f"{prefix}{i:0{width}d}", time, default_expertise=expertise) for i in range(n)
        )

    def __iter__(self):
        return iter(self._workers)

    def __len__(self) -> int:
        return len(self._workers)

    def __contains__(self, worker_id: object) -> bool:
        return worker_id in self._by_id

    def __getitem__(self, worker_id: str) -> Worker:
        return self._by_id[worker_id]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WorkerPool):
            return NotImplemented
        return self._workers == other._workers

    def __repr__(self) -> str:
        return f"WorkerPool({list(self._workers)!r})"

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(w.id for w in self._workers)


@dataclass(frozen=True)
class GranularityReport:
    ratio: float
    naive_ratio: float
    bottleneck_node: str


@dataclass(frozen=True)
class ContextCostReport:
    per_node: Mapping[str, float]
    max_cost: float
    argmax: str


def _check_unit(value: float, what: str) -> float:
    value = float(value)
    if not (0.0 <= value <= 1.0):
        raise WeightOutOfRange(f"{what} = {value} is outside [0, 1]")
    return value


def validate_graph(
    nodes: Iterable[tuple[str, float] | tuple[str, float, float]],
    edges: Iterable[tuple[str, str] | tuple[str, str, float]] = (),
) -> TaskGraph:
    """Check a candidate graph and return it with a cached topological order.

    ``nodes`` holds ``(id, size)`` or ``(id, size, self_dep)`` tuples and
    ``edges`` holds ``(u, v)`` or ``(u, v, dep)``; omitted weights default to 0.
    Topological ties are broken by ascending node id.
    """
    sizes: dict[str, float] = {}
    self_dep: dict[str, float] = {}
    for item in nodes:
        v, s = str(item[0]), float(item[1])
        d = item[2] if len(item) > 2 else 0.0
        if v in sizes:
            raise DuplicateNode(f"duplicate node {v!r}")
        if not (s > 0 and math.isfinite(s)):
            raise NonPositiveSize(f"size of {v!r} must be positive and finite, got {s}")
        sizes[v] = s
        self_dep[v] = _check_unit(d, f"d[{v}]")

    edge_dep: dict[Edge, float] = {}
    children: dict[str, list[str]] = {v: [] for v in sizes}
    prereqs: dict[str, list[str]] = {v: [] for v in sizes}
    for item in edges:
        u, v = str(item[0]), str(item[1])
        d = item[2] if len(item) > 2 else 0.0
        if u not in sizes or v not in sizes:
            missing = u if u not in sizes else v
            raise DanglingEdge(f"edge {u!r} -> {v!r} references undeclared node {missing!r}")
        if u == v:
            raise SelfLoop(f"self-loop on {u!r}")
        if (u, v) in edge_dep:
            raise DuplicateEdge(f"duplicate edge {u!r} -> {v!r}")
        edge_dep[(u, v)] = _check_unit(d, f"d[{u},{v}]")
        children[u].append(v)
        prereqs[v].append(u)

    indegree = {v: len(p) for v, p in prereqs.items()}
    heap = [v for v, k in indegree.items() if k == 0]
    heapq.heapify(heap)
    order: list[str] = []
    while heap:
        u = heapq.heappop(heap)
        order.append(u)
        for v in children[u]:
            indegree[v] -= 1
            if indegree[v] == 0:
                heapq.heappush(heap, v)
    if len(order) != len(sizes):
        raise CycleDetected(_find_cycle({v for v, k in indegree.items() if k > 0}, children))

    return TaskGraph(
        sizes=MappingProxyType(sizes),
        self_dep=MappingProxyType(self_dep),
        edge_dep=MappingProxyType(edge_dep),
        order=tuple(order),
        _prereqs=MappingProxyType({v: tuple(sorted(p)) for v, p in prereqs.items()}),
    )


def _find_cycle(remaining: set[str], children: Mapping[str, list[str]]) -> list[str]:
    # Every node left over by Kahn's pass lies on or downstream of a cycle, so
    # walking successors inside the leftover set must revisit a node.
    start = min(remaining)
    path: list[str] = []
    seen: dict[str, int] = {}
    v = start
    while v not in seen:
        seen[v] = len(path)
        path.append(v)
        v = min(c for c in children[v] if c in remaining)
    return path[seen[v]:] + [v]


def scale_graph(g: TaskGraph, c: float) -> TaskGraph:
    """Member of the interdependency family of ``g`` with every size times ``c``."""
    if not (c > 0 and math.isfinite(c)):
        raise NonPositiveScale(f"scale must be positive, got {c}")
    return validate_graph(
        ((v, g.sizes[v] * c, g.self_dep[v]) for v in g.order),
        ((u, v, d) for (u, v), d in g.edge_dep.items()),
    )


def scale_to_total(g: TaskGraph, total: float) -> TaskGraph:
    return scale_graph(g, total / g.total_size)


def granularity(g: TaskGraph) -> GranularityReport:
    if not g.order:
        raise EmptyGraph("granularity is undefined for an empty graph")
    total = g.total_size
    best_v, best = None, -1.0
    for v in g.order:
        denom = g.sizes[v] + math.fsum(g.sizes[u] for u in g.prereqs(v))
        if denom > best:
            best_v, best = v, denom
    return GranularityReport(
        ratio=total / best,
        naive_ratio=total / max(g.sizes.values()),
        bottleneck_node=best_v,
    )


def _expertise_lookup(g: TaskGraph, expertise: Mapping[str, float] | float) -> dict[str, float]:
    if isinstance(expertise, (int, float)):
        if not expertise > 0:
            raise MissingExpertise(f"expertise must be positive, got {expertise}")
        return {v: float(expertise) for v in g.order}
    missing = [v for v in g.order if v not in expertise]
    if missing:
        raise MissingExpertise(f"no expertise given for {', '.join(missing)}")
    bad = [v for v in g.order if not expertise[v] > 0]
    if bad:
        raise MissingExpertise(f"expertise must be positive for {', '.join(bad)}")
    return {v: float(expertise[v]) for v in g.order}


def max_context_cost(g: TaskGraph, expertise: Mapping[str, float] | float) -> ContextCostReport:
    """Per-node worst-case context time: own context plus all prerequisite context.

    Ties for the maximum go to the node that comes first in topological order.
    """
    if not g.order:
        raise EmptyGraph("context cost is undefined for an empty graph")
    e = _expertise_lookup(g, expertise)
    per_node = {}
    for v in g.order:
        own = g.sizes[v] * g.self_dep[v] / e[v]
        inherited = math.fsum(g.sizes[u] * g.edge_dep[(u, v)] / e[u] for u in g.prereqs(v))
        per_node[v] = own + inherited
    argmax = max(g.order, key=lambda v: per_node[v])
    return ContextCostReport(MappingProxyType(per_node), per_node[argmax], argmax)


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

_GRAPH_KEYS = {"nodes", "edges"}


def _number(obj: Any, what: str) -> float:
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise ParseError(f"{what} must be a number, got {obj!r}")
    return float(obj)


def graph_from_dict(data: Any) -> TaskGraph:
    if not isinstance(data, dict):
        raise ParseError("graph JSON must be an object")
    unknown = set(data) - _GRAPH_KEYS
    if unknown:
        raise ParseError(f"unknown top-level keys in graph: {sorted(unknown)}")
    if "nodes" not in data:
        raise ParseError("graph JSON lacks 'nodes'")
    nodes = []
    for i, item in enumerate(data["nodes"]):
        if not isinstance(item, dict) or "id" not in item or "size" not in item:
            raise ParseError(f"node #{i} must be an object with 'id' and 'size'")
        if "d" not in item:
            log.warning("node %r has no 'd'; defaulting to 0", item["id"])
        nodes.append((str(item["id"]), _number(item["size"], "size"), _number(item.get("d", 0.0), "d")))
    edges = []
    for i, item in enumerate(data.get("edges", [])):
        if not isinstance(item, dict) or "from" not in item or "to" not in item:
            raise ParseError(f"edge #{i} must be an object with 'from' and 'to'")
        if "d" not in item:
            log.warning("edge %r -> %r has no 'd'; defaulting to 0", item["from"], item["to"])
        edges.append((str(item["from"]), str(item["to"]), _number(item.get("d", 0.0), "d")))
    return validate_graph(nodes, edges)


def graph_to_dict(g: TaskGraph) -> dict:
    return {
        "nodes": [{"id": v, "size": g.sizes[v], "d": g.self_dep[v]} for v in g.order],
        "edges": [{"from": u, "to": v, "d": g.edge_dep[(u, v)]} for u, v in g.edges],
    }


def load_graph(path: str | Path) -> TaskGraph:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from exc
    return graph_from_dict(data)


def pool_from_dict(data: Any) -> WorkerPool:
    """Parse ``{"workers": [{"id", "time", "expertise": {...}, "default_expertise"}]}``."""
    if not isinstance(data, dict) or set(data) != {"workers"}:
        raise ParseError("pool JSON must be an object with exactly one key, 'workers'")
    workers = []
    for i, item in enumerate(data["workers"]):
        if not isinstance(item, dict) or "id" not in item or "time" not in item:
            raise ParseError(f"worker #{i} must be an object with 'id' and 'time'")
        unknown = set(item) - {"id", "time", "expertise", "default_expertise"}
        if unknown:
            raise ParseError(f"worker #{i}: unknown keys {sorted(unknown)}")
        exp = item.get("expertise", {})
        if not isinstance(exp, dict):
            raise ParseError(f"worker #{i}: 'expertise' must be an object")
        workers.append(
            Worker(
                str(item["id"]),
                _number(item["time"], "time"),
                {str(k): _number(x, "expertise") for k, x in exp.items()},
                _number(item.get("default_expertise", 1.0), "default_expertise"),
            )
        )
    return WorkerPool(workers)


def pool_to_dict(pool: WorkerPool) -> dict:
    return {
        "workers": [
            {
                "id": w.id,
                "time": w.time,
                "expertise": dict(sorted(w.expertise.items())),
                "default_expertise": w.default_expertise,
            }
            for w in pool
        ]
    }


def load_pool(path: str | Path) -> WorkerPool:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from exc
    return pool_from_dict(data)
