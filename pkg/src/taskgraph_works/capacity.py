"""Work capacity: limits, thresholds, top-worker selection, search oracle."""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from types import MappingProxyType

from .errors import InfeasibleInput, SearchBudgetExceeded, TaskGraphError, ZeroInterdependency
from .execution import (
    COMPLETION_TOL,
    Assignment,
    SubtaskAssignment,
    check_feasible,
    geometric_capacity,
    prerequisite_context_time,
)
from .model import TaskGraph, WorkerPool, _expertise_lookup, granularity, max_context_cost, scale_to_total


@dataclass(frozen=True)
class CapacityResult:
    capacity: float
    per_node_limit: Mapping[str, float]
    bottleneck_node: str
    unbounded: bool = False

    def to_dict(self) -> dict:
        def enc(x: float) -> float | str:
            return "unbounded" if math.isinf(x) else x

        return {
            "capacity": enc(self.capacity),
            "bottleneck_node": None if self.unbounded else self.bottleneck_node,
            "per_node_limit": {v: enc(x) for v, x in self.per_node_limit.items()},
        }


@dataclass(frozen=True)
class ThresholdResult:
    epsilon: float
    required_time: float
    worker_count: int
    verified_capacity: float


def capacity_limit(g: TaskGraph, expertise: Mapping[str, float] | float, t: float) -> CapacityResult:
    """Largest total size an unlimited homogeneous pool can finish.

    Each node's limit is ``t * s`` divided by its worst-case context time; the graph's capacity is the smallest of these.  When no node has any
    context cost the result is flagged ``unbounded`` with infinite capacity.
    """
    if not t > 0:
        raise TaskGraphError(f"time budget must be positive, got {t}")
    costs = max_context_cost(g, expertise)
    s = g.total_size
    per_node = {v: (t * s / c if c > 0 else math.inf) for v, c in costs.per_node.items()}
    if costs.max_cost <= 0:
        return CapacityResult(math.inf, MappingProxyType(per_node), costs.argmax, unbounded=True)
    return CapacityResult(t * s / costs.max_cost, MappingProxyType(per_node), costs.argmax)


def uniform_capacity(g: TaskGraph, e: float, t: float, d: float) -> float:
    """Closed form ``e * t * granularity / d`` for graphs with one shared interdependency."""
    if d <= 0:
        return math.inf
    return e * t * granularity(g).ratio / d


def geometric_factor(d: float, n: int) -> float:
    """``sum_{k=1}^{n} (1-d)^(n-k)``."""
    if d == 0:
        return float(n)
    return (1.0 - (1.0 - d) ** n) / d


def homogeneous_subtask_capacity(prereq_context: float, e: float, t: float, d: float, n: int) -> float:
    """Largest subtask ``n`` identical full-time workers can complete."""
    if t <= prereq_context or n <= 0:
        return 0.0
    return e * (t - prereq_context) * geometric_factor(d, n)


def per_node_homogeneous_capacity(
    g: TaskGraph, expertise: Mapping[str, float] | float, t: float, n: int
) -> CapacityResult:
    """Largest scaled copy of ``g`` finished with ``n`` full-time workers per node.

    Scaling a node's size also scales its prerequisites' context, so each node
    bounds the scale through a linear inequality in it; the tightest wins.
    """
    e = _expertise_lookup(g, expertise)
    s = g.total_size
    per_node = {}
    for v in g.order:
        x = math.fsum(g.sizes[u] * g.edge_dep[(u, v)] / e[u] for u in g.prereqs(v))
        q = geometric_factor(g.self_dep[v], n)
        per_node[v] = s * e[v] * t * q / (g.sizes[v] + e[v] * q * x)
    bottleneck = min(g.order, key=lambda v: per_node[v])
    return CapacityResult(per_node[bottleneck], MappingProxyType(per_node), bottleneck)


def workers_needed(
    size: float, self_dep: float, expertise: float, prereq_context: float, epsilon: float
) -> ThresholdResult:
    """Worker count and per-worker time at which a subtask becomes feasible.

    The per-worker time is the subtask's full context time plus an
    ``eps / (1 - eps)`` share of its own context; at that budget
    ``ceil(ln(1/eps) / self_dep)`` homogeneous workers suffice.
    """
    if not 0 < epsilon < 1:
        raise TaskGraphError(f"epsilon must lie in (0, 1), got {epsilon}")
    if self_dep <= 0:
        raise ZeroInterdependency(
            "zero self-interdependency: one worker with time size/expertise plus prerequisite context suffices"
        )
    own = size * self_dep / expertise
    required = own + prereq_context + own * epsilon / (1.0 - epsilon)
    count = max(1, math.ceil(math.log(1.0 / epsilon) / self_dep))
    cap = homogeneous_subtask_capacity(prereq_context, expertise, required, self_dep, count)
    if cap < size * (1 - 1e-12):
        raise AssertionError(f"threshold verification failed: {cap} < {size}")
    return ThresholdResult(epsilon, required, count, cap)


def harmonic_mean(values: Sequence[float]) -> float:
    if any(x <= 0 for x in values):
        return 0.0
    return len(values) / math.fsum(1.0 / x for x in values)


def top_worker_bound(g: TaskGraph, epsilon: float) -> float:
    """Node count over the harmonic-mean self-interdependency, times ``ln(1/eps)``.

    Infinite when some node has zero self-interdependency.
    """
    mean_dep = harmonic_mean([g.self_dep[v] for v in g.order])
    if mean_dep == 0:
        return math.inf
    return len(g) / mean_dep * math.log(1.0 / epsilon)


@dataclass(frozen=True)
class TopWorkerSelection:
    workers: frozenset[str]
    assignment: Assignment
    bound: float
    kept_per_node: Mapping[str, int]
    original_work: float
    reduced_work: float
    epsilon: float

    @property
    def guarantee_holds(self) -> bool:
        return self.reduced_work >= (1.0 - self.epsilon) * self.original_work - COMPLETION_TOL


def select_top_workers(
    g: TaskGraph, a: Assignment, pool: WorkerPool, epsilon: float
) -> TopWorkerSelection:
    """Keep the ``ceil(ln(1/eps)/self_dep)`` workers with most expertise-weighted time per node.

    Kept workers retain their allocations and run in ascending order of
    expertise times allocation, which never lowers completed work.
    """
    if not 0 < epsilon < 1:
        raise TaskGraphError(f"epsilon must lie in (0, 1), got {epsilon}")
    report, trace = check_feasible(g, a, pool)
    if not report.feasible:
        raise InfeasibleInput(f"assignment is not feasible: {report.first_violation}")

    reduced = {}
    kept_counts = {}
    for v, sub in a.items():
        dep = g.self_dep[v]
        limit = len(sub.workers) if dep == 0 else math.ceil(math.log(1.0 / epsilon) / dep)
        ranked = [
            (pool[w].e(v) * r, k, w, r) for k, (w, r) in enumerate(zip(sub.workers, sub.times))
        ]
        # Top ``limit`` by weighted time; ties go to the later position.
        top = sorted(ranked, key=lambda x: (x[0], x[1]))[-limit:] if limit else []
        top.sort(key=lambda x: (x[0], x[1]))
        reduced[v] = SubtaskAssignment(tuple(x[2] for x in top), tuple(x[3] for x in top))
        kept_counts[v] = len(top)
    reduced_a = Assignment(reduced)
    _, reduced_trace = check_feasible(g, reduced_a, pool)
    return TopWorkerSelection(
        workers=frozenset(reduced_a.workers()),
        assignment=reduced_a,
        bound=top_worker_bound(g, epsilon),
        kept_per_node=MappingProxyType(kept_counts),
        original_work=trace.total_completed_work,
        reduced_work=reduced_trace.total_completed_work,
        epsilon=epsilon,
    )


# ---------------------------------------------------------------------------
# Exhaustive search oracle
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SearchResult:
    best_size: float | None
    witness: Assignment | None
    evaluated: int


def _compositions(total: int, parts: int) -> list[tuple[int, ...]]:
    out = []
    for bars in itertools.combinations(range(total + parts - 1), parts - 1):
        prev, comp = -1, []
        for b in bars:
            comp.append(b - prev - 1)
            prev = b
        comp.append(total + parts - 2 - prev)
        out.append(tuple(comp))
    return out


def _ascending_assignment(per_node: Mapping[str, list[tuple[float, str, float]]]) -> Assignment:
    per_subtask = {}
    for v, entries in per_node.items():
        entries = sorted(entries)
        per_subtask[v] = SubtaskAssignment(tuple(w for _, w, _ in entries), tuple(r for _, _, r in entries))
    return Assignment(per_subtask)


def brute_force_capacity(
    g: TaskGraph,
    pool: WorkerPool,
    size_grid: Iterable[float],
    *,
    levels: int = 16,
    max_nodes: int = 4,
    max_workers: int = 6,
    max_combinations: int = 2_000_000,
) -> SearchResult:
    """Largest grid total size (scaling ``g``) with a feasible assignment.

    Every worker either idles or splits the time left after prerequisite
    context over a subset of nodes in multiples of ``1/levels``.  Workers on a
    node run in ascending ``e * r`` order.  Each candidate is judged by full
    simulation; the first feasible candidate found is the witness.
    """
    nodes = g.order
    if len(nodes) > max_nodes or len(pool) > max_workers:
        raise SearchBudgetExceeded(
            f"search limited to {max_nodes} nodes and {max_workers} workers, "
            f"got {len(nodes)} and {len(pool)}"
        )
    fractions = _compositions(levels, len(nodes)) if nodes else []
    n_options = len(fractions) + 1
    if n_options ** len(pool) > max_combinations:
        raise SearchBudgetExceeded(
            f"{n_options}^{len(pool)} candidate assignments exceeds the cap of {max_combinations}"
        )

    evaluated = 0
    for size in sorted(set(size_grid), reverse=True):
        gs = scale_to_total(g, size)
        per_worker = []
        for w in pool:
            ctx = {v: prerequisite_context_time(gs, v, w) for v in nodes}
            options: list[tuple[tuple[str, float, float], ...]] = []
            for frac in fractions:
                chosen = [v for v, f in zip(nodes, frac) if f]
                residual = w.time - math.fsum(ctx[v] for v in chosen)
                if residual < 0:
                    continue
                options.append(
                    tuple((v, w.e(v) * residual * f / levels, residual * f / levels) for v, f in zip(nodes, frac) if f)
                )
            options.append(())
            per_worker.append(options)

        for combo in itertools.product(*per_worker):
            per_node: dict[str, list[tuple[float, str, float]]] = {v: [] for v in nodes}
            for w, option in zip(pool, combo):
                for v, weighted, r in option:
                    per_node[v].append((weighted, w.id, r))
            # Necessary condition: nobody contributes more than e * r.
            if any(math.fsum(x[0] for x in per_node[v]) < gs.sizes[v] - COMPLETION_TOL for v in nodes):
                continue
            evaluated += 1
            candidate = _ascending_assignment(per_node)
            report, _ = check_feasible(gs, candidate, pool)
            if report.feasible:
                return SearchResult(size, candidate, evaluated)
    return SearchResult(None, None, evaluated)


def heuristic_capacity(g: TaskGraph, pool: WorkerPool, size_grid: Iterable[float]) -> SearchResult:
    """Greedy single-node assignment scored by the geometric closed form.

    Workers, strongest first, join the node whose closed-form progress ratio
    is currently lowest, bringing all time left after prerequisite context.
    """
    evaluated = 0
    for size in sorted(set(size_grid), reverse=True):
        gs = scale_to_total(g, size)
        per_node: dict[str, list[tuple[float, str, float]]] = {v: [] for v in gs.order}

        def progress(v: str) -> float:
            weighted = sorted(x[0] for x in per_node[v])
            return geometric_capacity(weighted, gs.self_dep[v]) / gs.sizes[v]

        def best_weighted(w) -> float:
            return max(w.e(v) * (w.time - prerequisite_context_time(gs, v, w)) for v in gs.order)

        for w in sorted(pool, key=lambda w: (-best_weighted(w), w.id)):
            open_nodes = [v for v in gs.order if w.time > prerequisite_context_time(gs, v, w)]
            if not open_nodes:
                continue
            v = min(open_nodes, key=lambda v: (progress(v), v))
            r = w.time - prerequisite_context_time(gs, v, w)
            per_node[v].append((w.e(v) * r, w.id, r))
        evaluated += 1
        candidate = _ascending_assignment(per_node)
        report, _ = check_feasible(gs, candidate, pool)
        if report.feasible:
            return SearchResult(size, candidate, evaluated)
    return SearchResult(None, None, evaluated)


def capacity_report(
    g: TaskGraph, e: float, t: float, epsilons: Sequence[float] = ()
) -> dict:
    """JSON-ready capacity diagnostics for a homogeneous worker family."""
    gran = granularity(g)
    costs = max_context_cost(g, e)
    limit = capacity_limit(g, e, t)
    thresholds = []
    for v in g.order:
        prereq = math.fsum(g.sizes[u] * g.edge_dep[(u, v)] / e for u in g.prereqs(v))
        for eps in epsilons:
            row = {"node": v, "epsilon": eps}
            try:
                res = workers_needed(g.sizes[v], g.self_dep[v], e, prereq, eps)
                row.update(required_time=res.required_time, workers=res.worker_count)
            except ZeroInterdependency:
                row.update(required_time=None, workers=None, note="zero self-interdependency")
            thresholds.append(row)
    d_values = set(g.self_dep.values()) | set(g.edge_dep.values())
    report = {
        "t": t,
        "e": e,
        "total_size": g.total_size,
        "granularity": gran.ratio,
        "naive_granularity": gran.naive_ratio,
        "granularity_bottleneck": gran.bottleneck_node,
        "context_cost": dict(costs.per_node),
        "max_context_cost": costs.max_cost,
        **limit.to_dict(),
        "thresholds": thresholds,
    }
    if len(d_values) == 1:
        (d,) = d_values
        report["uniform_capacity"] = "unbounded" if d == 0 else uniform_capacity(g, e, t, d)
    return report
