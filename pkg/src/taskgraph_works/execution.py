"""Sequential execution of assignments and feasibility checking.

Workers assigned to one subtask take turns.  The ``k``-th worker first spends
proportional to the work already done on the subtask (never more than their
allocation), then turns the rest of their allocation into new work at their
expertise rate, capped by what is left.  Context on prerequisites (each
prerequisite's size times the edge weight, over the worker's expertise on it)
is paid on top of the allocation.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections import defaultdict
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Any

from .errors import (
    AllocationNegative,
    InconsistentObservations,
    MalformedAssignment,
    ParseError,
    PositivityViolated,
    UnknownSubtask,
    UnknownWorker,
)
from .model import TaskGraph, Worker, WorkerPool

COMPLETION_TOL = 1e-9
BUDGET_TOL = 1e-9


@dataclass(frozen=True)
class SubtaskAssignment:
    workers: tuple[str, ...]
    times: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "workers", tuple(self.workers))
        object.__setattr__(self, "times", tuple(float(r) for r in self.times))
        if len(self.workers) != len(self.times):
            raise MalformedAssignment(
                f"{len(self.workers)} workers but {len(self.times)} time allocations"
            )
        for r in self.times:
            if r < 0 or math.isnan(r):
                raise AllocationNegative(f"time allocation must be nonnegative, got {r}")


class Assignment(Mapping[str, SubtaskAssignment]):
    """Per-subtask worker orderings and time allocations."""

    def __init__(self, per_node: Mapping[str, SubtaskAssignment | tuple[Sequence[str], Sequence[float]]] = ()):
        items = dict(per_node)
        self._data: dict[str, SubtaskAssignment] = {}
        for v, sub in items.items():
            self._data[v] = sub if isinstance(sub, SubtaskAssignment) else SubtaskAssignment(*sub)

    def __getitem__(self, v: str) -> SubtaskAssignment:
        return self._data[v]

    def __iter__(self):
        return iter(self._data)

    def __len__(self) -> int:
        return len(self._data)

    def __repr__(self) -> str:
        return f"Assignment({self._data!r})"

    def workers(self) -> set[str]:
        return {w for a in self._data.values() for w in a.workers}


@dataclass(frozen=True)
class StepRecord:
    worker: str
    context_time: float
    contribution: float
    cumulative: float
    prereq_context_time: float
    work_time: float = 0.0
    active: bool = True

    @property
    def time_used(self) -> float:
        """Time charged to the worker for this step, prerequisites included."""
        if not self.active:
            return 0.0
        return self.prereq_context_time + self.context_time + self.work_time


@dataclass(frozen=True)
class SubtaskExecution:
    node: str
    steps: tuple[StepRecord, ...]
    feasible: bool

    @property
    def completed_work(self) -> float:
        return self.steps[-1].cumulative if self.steps else 0.0


@dataclass(frozen=True)
class ExecutionTrace:
    executions: Mapping[str, SubtaskExecution]
    worker_time: Mapping[str, float]

    def completed(self, v: str) -> bool:
        return self.executions[v].feasible

    @property
    def total_completed_work(self) -> float:
        return math.fsum(x.completed_work for x in self.executions.values())

    def to_csv(self) -> str:
        buf = io.StringIO()
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(["node", "step", "worker", "context", "contribution", "cumulative"])
        for v, ex in self.executions.items():
            for k, st in enumerate(ex.steps, start=1):
                out.writerow([v, k, st.worker, repr(st.context_time), repr(st.contribution), repr(st.cumulative)])
        return buf.getvalue()


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    node_feasible: Mapping[str, bool]
    slack: Mapping[str, float]
    first_violation: str | None

    def to_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "node_feasible": dict(self.node_feasible),
            "slack": dict(self.slack),
            "first_violation": self.first_violation,
        }


def prerequisite_context_time(g: TaskGraph, v: str, worker: Worker) -> float:
    """Time ``worker`` spends absorbing the prerequisites of ``v``."""
    return math.fsum(g.sizes[u] * g.edge_dep[(u, v)] / worker.e(u) for u in g.prereqs(v))


def _resolve(pool: WorkerPool, worker_id: str) -> Worker:
    try:
        return pool[worker_id]
    except KeyError:
        raise UnknownWorker(f"unknown worker {worker_id!r}") from None


def execute_subtask(
    g: TaskGraph,
    v: str,
    workers: Sequence[str],
    times: Sequence[float],
    pool: WorkerPool,
) -> SubtaskExecution:
    """Run the workers in ``workers`` on ``v`` in order and record every step."""
    g.require(v)
    sub = SubtaskAssignment(tuple(workers), tuple(times))
    size, dep = g.sizes[v], g.self_dep[v]
    done = 0.0
    steps = []
    for wid, r in zip(sub.workers, sub.times):
        worker = _resolve(pool, wid)
        if done >= size - COMPLETION_TOL:
            steps.append(StepRecord(wid, 0.0, 0.0, done, 0.0, active=False))
            continue
        e = worker.e(v)
        c = min(done * dep / e, r)
        remaining = size - done
        w = max(0.0, min(e * (r - c), remaining))
        done = size if w == remaining else done + w
        steps.append(StepRecord(wid, c, w, done, prerequisite_context_time(g, v, worker), w / e))
    return SubtaskExecution(v, tuple(steps), done >= size - COMPLETION_TOL)


def check_feasible(
    g: TaskGraph,
    a: Assignment,
    pool: WorkerPool,
    *,
    context_reuse: bool = False,
) -> tuple[FeasibilityReport, ExecutionTrace]:
    """Execute every subtask and check completion plus worker time budgets.

    With ``context_reuse`` a worker on several subtasks that share a
    prerequisite ``u`` pays for ``u`` once, at the largest of the costs.
    """
    for v in a:
        if v not in g:
            raise UnknownSubtask(f"assignment references unknown subtask {v!r}")
    executions = {}
    for v in g.order:
        sub = a.get(v)
        if sub is None:
            executions[v] = SubtaskExecution(v, (), False)
        else:
            executions[v] = execute_subtask(g, v, sub.workers, sub.times, pool)

    used: dict[str, float] = defaultdict(float)
    reuse_cost: dict[str, dict[str, float]] = defaultdict(dict)
    for v, ex in executions.items():
        for st in ex.steps:
            if not st.active:
                continue
            used[st.worker] += st.time_used
            if context_reuse:
                used[st.worker] -= st.prereq_context_time
                worker = pool[st.worker]
                for u in g.prereqs(v):
                    cost = g.sizes[u] * g.edge_dep[(u, v)] / worker.e(u)
                    seen = reuse_cost[st.worker]
                    seen[u] = max(seen.get(u, 0.0), cost)
    if context_reuse:
        for wid, per_u in reuse_cost.items():
            used[wid] += math.fsum(per_u.values())

    slack = {w.id: w.time - used.get(w.id, 0.0) for w in pool}
    node_ok = {v: ex.feasible for v, ex in executions.items()}
    violation = None
    for v in g.order:
        if not node_ok[v]:
            violation = f"subtask {v!r} incomplete: {executions[v].completed_work:.6g} of {g.sizes[v]:.6g}"
            break
    if violation is None:
        for w in pool:
            if slack[w.id] < -BUDGET_TOL:
                violation = f"worker {w.id!r} over budget by {-slack[w.id]:.6g}"
                break
    report = FeasibilityReport(
        feasible=violation is None,
        node_feasible=MappingProxyType(node_ok),
        slack=MappingProxyType(slack),
        first_violation=violation,
    )
    trace = ExecutionTrace(MappingProxyType(executions), MappingProxyType(dict(used)))
    return report, trace


def geometric_capacity(weighted_times: Iterable[float], d: float) -> float:
    """Sum of weighted times, each discounted by ``1 - d`` per later worker (Horner)."""
    total = 0.0
    for x in weighted_times:
        total = total * (1.0 - d) + x
    return total


def closed_form_v_feasible(
    g: TaskGraph,
    v: str,
    workers: Sequence[str],
    times: Sequence[float],
    pool: WorkerPool,
) -> bool:
    """Decide v-feasibility with the geometric-sum test.

    Only valid when every worker makes a positive contribution; this is
    checked by simulation and :class:`PositivityViolated` raised otherwise.
    """
    ex = execute_subtask(g, v, workers, times, pool)
    for k, st in enumerate(ex.steps, start=1):
        if not st.active or st.contribution <= 0:
            raise PositivityViolated(
                f"worker #{k} ({st.worker!r}) on {v!r} contributes nothing; closed form does not apply"
            )
    weighted = [pool[w].e(v) * r for w, r in zip(workers, times)]
    return geometric_capacity(weighted, g.self_dep[v]) >= g.sizes[v] - COMPLETION_TOL


@dataclass(frozen=True)
class InterdependencyEstimate:
    size: float
    d: float
    raw_d: float
    clamped: bool


def estimate_interdependency(
    solo_time: float,
    expertise: float,
    first_time: float,
    second_time: float,
) -> InterdependencyEstimate:
    """Infer size and self-interdependency from a solo run and a two-worker handoff.

    The solo run gives the size as expertise times ``solo_time``.  In the
    handoff the second worker needs ``solo_time - first_time`` for the remaining work, so any
    extra time is context on the first worker's ``first_time`` of effort.
    """
    if not (solo_time > 0 and expertise > 0 and 0 < first_time < solo_time and second_time >= 0):
        raise InconsistentObservations(
            "need solo_time > 0, expertise > 0, 0 < first_time < solo_time, second_time >= 0"
        )
    extra = second_time - (solo_time - first_time)
    raw = extra / first_time
    if raw < 0:
        raise InconsistentObservations(
            f"second worker finished faster than the remaining work allows (d = {raw:.6g})"
        )
    return InterdependencyEstimate(expertise * solo_time, min(raw, 1.0), raw, raw > 1.0)


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def assignment_from_dict(data: Any) -> Assignment:
    """Parse ``{"v": {"workers": [...], "times": [...]}}``."""
    if not isinstance(data, dict):
        raise ParseError("assignment JSON must be an object")
    per_node = {}
    for v, item in data.items():
        if not isinstance(item, dict) or set(item) != {"workers", "times"}:
            raise ParseError(f"assignment for {v!r} must have exactly 'workers' and 'times'")
        if not isinstance(item["workers"], list) or not isinstance(item["times"], list):
            raise ParseError(f"assignment for {v!r}: 'workers' and 'times' must be lists")
        for r in item["times"]:
            if isinstance(r, bool) or not isinstance(r, (int, float)):
                raise ParseError(f"assignment for {v!r}: time {r!r} is not a number")
        per_node[str(v)] = SubtaskAssignment(tuple(map(str, item["workers"])), tuple(item["times"]))
    return Assignment(per_node)


def assignment_to_dict(a: Assignment) -> dict:
    return {v: {"workers": list(s.workers), "times": list(s.times)} for v, s in a.items()}


def load_assignment(path: str | Path) -> Assignment:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from exc
    return assignment_from_dict(data)
