"""Occupations, coordination intensity, required expertise, and wages."""

from __future__ import annotations

import json
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import (
    DeadlineExceeded,
    DegenerateScenario,
    EmptyOccupation,
    NonPositiveExpertise,
    OverlappingOccupations,
    ParseError,
    TaskGraphError,
    UnknownSubtask,
)
from .model import TaskGraph

DEFAULT_WAGE_EXPONENT = 1.5


@dataclass(frozen=True)
class Occupation:
    id: str
    subtasks: frozenset[str]

    def __post_init__(self) -> None:
        object.__setattr__(self, "subtasks", frozenset(self.subtasks))
        if not self.subtasks:
            raise EmptyOccupation(f"occupation {self.id!r} has no subtasks")

    def size(self, g: TaskGraph) -> float:
        return math.fsum(g.sizes[v] for v in sorted(self.subtasks))


def coordination_intensity(g: TaskGraph, occupation: Occupation, *, exclude_internal: bool = False) -> float:
    """Prerequisite context an occupation must absorb, in units of work.

    Each prerequisite counts once, at the largest ``size * edge weight`` over
    the occupation's subtasks that depend on it.  Prerequisites inside the
    occupation count unless ``exclude_internal``.
    """
    if not occupation.subtasks:
        raise EmptyOccupation(f"occupation {occupation.id!r} has no subtasks")
    worst: dict[str, float] = {}
    for v in occupation.subtasks:
        g.require(v)
        for u in g.prereqs(v):
            if exclude_internal and u in occupation.subtasks:
                continue
            cost = g.sizes[u] * g.edge_dep[(u, v)]
            worst[u] = max(worst.get(u, 0.0), cost)
    return math.fsum(worst[u] for u in sorted(worst))


@dataclass(frozen=True)
class WageModel:
    exponent: float = DEFAULT_WAGE_EXPONENT

    def __post_init__(self) -> None:
        if not self.exponent > 1:
            raise TaskGraphError(f"wage exponent must exceed 1, got {self.exponent}")


def wage(model: WageModel, x: float) -> float:
    if not x > 0:
        raise NonPositiveExpertise(f"expertise must be positive, got {x}")
    return x ** model.exponent


class RecruitmentScenario:
    """Occupations recruited for against a shared deadline."""

    def __init__(
        self,
        graph: TaskGraph,
        occupations: Sequence[Occupation],
        deadline: float,
        *,
        exclude_internal: bool = False,
    ) -> None:
        if not deadline > 0:
            raise TaskGraphError(f"deadline must be positive, got {deadline}")
        if not occupations:
            raise DegenerateScenario("scenario needs at least one occupation")
        seen: dict[str, str] = {}
        ids = set()
        for occ in occupations:
            if occ.id in ids:
                raise TaskGraphError(f"duplicate occupation id {occ.id!r}")
            ids.add(occ.id)
            for v in occ.subtasks:
                if v not in graph:
                    raise UnknownSubtask(f"occupation {occ.id!r} references unknown subtask {v!r}")
                if v in seen:
                    raise OverlappingOccupations(
                        f"subtask {v!r} belongs to both {seen[v]!r} and {occ.id!r}"
                    )
                seen[v] = occ.id
        self.graph = graph
        self.occupations = tuple(occupations)
        self.deadline = float(deadline)
        self.sizes = {o.id: o.size(graph) for o in self.occupations}
        self.coordination = {
            o.id: coordination_intensity(graph, o, exclude_internal=exclude_internal) for o in self.occupations
        }
        # Ties for the most coordination-intensive occupation go to the first listed.
        self.top = max(self.occupations, key=lambda o: self.coordination[o.id])

    def __getitem__(self, occ_id: str) -> Occupation:
        for o in self.occupations:
            if o.id == occ_id:
                return o
        raise KeyError(occ_id)

    @property
    def top_coordination(self) -> float:
        return self.coordination[self.top.id]

    @property
    def top_size(self) -> float:
        return self.sizes[self.top.id]

    @property
    def size_spread(self) -> float:
        """Largest ratio of the top occupation's size to any occupation's size."""
        return max(self.top_size / s for s in self.sizes.values())


@dataclass(frozen=True)
class RequiredExpertise:
    value: float
    harmonic_form: float | None


def _harmonic(a: float, b: float) -> float:
    if math.isinf(b):
        return 2.0 * a
    return 2.0 * a * b / (a + b)


def required_expertise(scenario: RecruitmentScenario, occupation: Occupation | str) -> RequiredExpertise:
    """Minimum expertise to finish an occupation's work in the time its coordination leaves.

    That is the occupation's size divided by ``deadline - coordination``.  The
    same value is also rebuilt as half the size ratio to the top occupation
    times the harmonic mean of the top occupation's requirement and
    ``top_size / (top_coordination - coordination)``, whenever the top
    occupation can itself meet the deadline.
    """
    occ = scenario[occupation] if isinstance(occupation, str) else occupation
    size = scenario.sizes[occ.id]
    coord = scenario.coordination[occ.id]
    if scenario.deadline <= coord:
        raise DeadlineExceeded(
            f"occupation {occ.id!r}: coordination intensity {coord:g} leaves no time before the deadline "
            f"{scenario.deadline:g}"
        )
    value = size / (scenario.deadline - coord)
    hm = None
    if scenario.deadline > scenario.top_coordination:
        top_required = scenario.top_size / (scenario.deadline - scenario.top_coordination)
        gap = scenario.top_coordination - coord
        other = math.inf if gap == 0 else scenario.top_size / gap
        hm = 0.5 * (size / scenario.top_size) * _harmonic(top_required, other)
    return RequiredExpertise(value, hm)


@dataclass(frozen=True)
class WageBounds:
    occupation: str
    coordination_share: float
    ln_expertise_lower: float
    ln_expertise_upper: float
    ln_wage_lower: float
    ln_wage_upper: float
    ln_expertise: float | None
    preconditions_satisfied: bool
    notes: tuple[str, ...] = field(default=())

    @property
    def contains(self) -> bool | None:
        if self.ln_expertise is None:
            return None
        return self.ln_expertise_lower - 1e-12 <= self.ln_expertise <= self.ln_expertise_upper + 1e-12


def wage_bounds(scenario: RecruitmentScenario, occupation: Occupation | str, model: WageModel) -> WageBounds:
    """Bounds on log required expertise and log wage, linear in the coordination share.

    The share is the occupation's coordination intensity over the top
    occupation's.  The bounds are guaranteed when the share is at most 1/2,
    the top coordination is at least two thirds of the deadline but below it,
    and the top occupation is at least as large as this one.  They are
    reported either way, with ``preconditions_satisfied`` recording whether
    all of these hold.
    """
    occ = scenario[occupation] if isinstance(occupation, str) else occupation
    top_coordination, top_size = scenario.top_coordination, scenario.top_size
    if top_coordination <= 0:
        raise DegenerateScenario("no occupation has any coordination intensity")
    share = scenario.coordination[occ.id] / top_coordination
    lower = share + math.log(top_size / (2.0 * scenario.size_spread * top_coordination))
    upper = 2.0 * share + math.log(top_size / top_coordination)

    notes = []
    if share > 0.5:
        notes.append("coordination share above 1/2")
    if top_coordination < 2.0 * scenario.deadline / 3.0:
        notes.append("top coordination below 2/3 of the deadline")
    if scenario.deadline <= top_coordination:
        notes.append("deadline not after top coordination")
    if scenario.sizes[occ.id] > top_size:
        notes.append("larger than the top occupation")
    try:
        ln_expertise = math.log(required_expertise(scenario, occ).value)
    except DeadlineExceeded:
        ln_expertise = None
        notes.append("deadline not after own coordination")
    ok = not notes
    result = WageBounds(
        occ.id,
        share,
        lower,
        upper,
        model.exponent * lower,
        model.exponent * upper,
        ln_expertise,
        ok,
        tuple(notes),
    )
    if ok and not result.contains:
        raise AssertionError(f"bounds {lower}..{upper} miss ln expertise = {ln_expertise} for {occ.id!r}")
    return result


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def occupations_from_dict(data: Any) -> tuple[list[Occupation], float | None]:
    """Parse ``{"graph": ..., "occupations": [{"id", "subtasks"}], "deadline": ...}``."""
    if not isinstance(data, dict):
        raise ParseError("scenario JSON must be an object")
    unknown = set(data) - {"graph", "occupations", "deadline"}
    if unknown:
        raise ParseError(f"unknown top-level keys in scenario: {sorted(unknown)}")
    if not isinstance(data.get("occupations"), list):
        raise ParseError("scenario JSON needs an 'occupations' list")
    occs = []
    for i, item in enumerate(data["occupations"]):
        if not isinstance(item, dict) or "id" not in item or not isinstance(item.get("subtasks"), list):
            raise ParseError(f"occupation #{i} must have 'id' and a 'subtasks' list")
        occs.append(Occupation(str(item["id"]), frozenset(map(str, item["subtasks"]))))
    deadline = data.get("deadline")
    if deadline is not None and (isinstance(deadline, bool) or not isinstance(deadline, (int, float))):
        raise ParseError("'deadline' must be a number")
    return occs, None if deadline is None else float(deadline)


def load_occupations(path: str | Path) -> tuple[list[Occupation], float | None, str | None]:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from exc
    occs, deadline = occupations_from_dict(data)
    return occs, deadline, data.get("graph")


def scenario_table(scenario: RecruitmentScenario, model: WageModel) -> list[dict]:
    """One row per occupation; deadline failures are rows, not exceptions."""
    rows = []
    for occ in scenario.occupations:
        row: dict[str, Any] = {
            "occupation": occ.id,
            "size": scenario.sizes[occ.id],
            "coordination": scenario.coordination[occ.id],
            "is_top": occ.id == scenario.top.id,
        }
        try:
            req = required_expertise(scenario, occ)
            row.update(status="ok", required_expertise=req.value, ln_expertise=math.log(req.value),
                       harmonic_form=req.harmonic_form, wage=wage(model, req.value))
        except DeadlineExceeded:
            row.update(status="DeadlineExceeded", required_expertise=None, ln_expertise=None,
                       harmonic_form=None, wage=None)
        try:
            b = wage_bounds(scenario, occ, model)
            row.update(coordination_share=b.coordination_share, ln_expertise_lower=b.ln_expertise_lower,
                       ln_expertise_upper=b.ln_expertise_upper, ln_wage_lower=b.ln_wage_lower,
                       ln_wage_upper=b.ln_wage_upper,
                       preconditions=b.preconditions_satisfied, notes=";".join(b.notes))
        except DegenerateScenario:
            row.update(coordination_share=None, ln_expertise_lower=None, ln_expertise_upper=None,
                       ln_wage_lower=None, ln_wage_upper=None, preconditions=False, notes="no coordination anywhere")
        rows.append(row)
    return rows

