"""Novice accessibility of subtask types in a uniform task ecosystem.

A novice works ``slowdown`` times slower than a trained worker everywhere
and becomes trained on a subtask type after completing it alone before the
deadline.
Upskilling on a prerequisite type cuts the context cost of every type that
depends on it, which can open up subtask types a raw novice cannot finish.
"""

from __future__ import annotations

import json
import math
from collections.abc import Collection, Mapping
from dataclasses import dataclass
from types import MappingProxyType

from .errors import DegenerateThreshold, InvalidEcosystem
from .model import TaskGraph

SLACK = 1e-12

TRIVIAL = "trivial"
LPP = "lpp"
INACCESSIBLE = "inaccessible"


@dataclass(frozen=True)
class EcosystemConfig:
    e_normal: float
    slowdown: float
    deadline: float

    def __post_init__(self) -> None:
        if not self.e_normal > 0:
            raise InvalidEcosystem(f"e_normal must be positive, got {self.e_normal}")
        if not self.slowdown > 1:
            raise InvalidEcosystem(f"slowdown must exceed 1, got {self.slowdown}")
        if not self.deadline > 0:
            raise InvalidEcosystem(f"deadline must be positive, got {self.deadline}")

    @property
    def e_novice(self) -> float:
        return self.e_normal / self.slowdown


@dataclass(frozen=True)
class NodeAccess:
    status: str
    upskilled_time: float
    upskilled_share: float
    threshold: float
    layer: int | None


@dataclass(frozen=True)
class AccessibilityReport:
    nodes: Mapping[str, NodeAccess]

    def accessible(self) -> frozenset[str]:
        return frozenset(v for v, a in self.nodes.items() if a.status != INACCESSIBLE)

    def to_dict(self) -> dict:
        return {
            v: {
                "status": a.status,
                "upskilled_time": a.upskilled_time,
                "upskilled_share": a.upskilled_share,
                "threshold": a.threshold,
                "layer": a.layer,
            }
            for v, a in self.nodes.items()
        }


@dataclass(frozen=True)
class ThresholdCheck:
    upskilled_share: float
    threshold: float
    novice_time: float
    holds: bool


def upskilled_cost(g: TaskGraph, cfg: EcosystemConfig, v: str) -> float:
    """Time a fully trained worker needs for ``v`` plus its prerequisite context."""
    context = math.fsum(g.sizes[u] * g.edge_dep[(u, v)] for u in g.prereqs(v))
    return (g.sizes[v] + context) / cfg.e_normal


def novice_time(g: TaskGraph, cfg: EcosystemConfig, v: str, upskilled: Collection[str]) -> float:
    """Time a novice upskilled on ``upskilled`` needs to complete ``v`` alone."""
    total = g.sizes[v] / cfg.e_novice
    for u in g.prereqs(v):
        e = cfg.e_normal if u in upskilled else cfg.e_novice
        total += g.sizes[u] * g.edge_dep[(u, v)] / e
    return total


def trivially_accessible(g: TaskGraph, cfg: EcosystemConfig) -> frozenset[str]:
    return frozenset(v for v in g.order if upskilled_cost(g, cfg, v) <= cfg.deadline / cfg.slowdown + SLACK)


def lpp_threshold(g: TaskGraph, cfg: EcosystemConfig, v: str, upskilled: Collection[str]) -> ThresholdCheck:
    """Compare the upskilled-context share of the trained time with the access threshold.

    The share is the fraction of the trained time for ``v`` spent absorbing
    prerequisites in ``upskilled``.  ``v`` is reachable exactly when the share
    is at least ``(k t - deadline) / ((k - 1) t)`` for slowdown ``k`` and
    trained time ``t``.
    """
    g.require(v)
    trained = upskilled_cost(g, cfg, v)
    denom = (cfg.slowdown - 1.0) * trained
    if denom <= 0:
        raise DegenerateThreshold(f"threshold for {v!r} has a vanishing denominator")
    shared = math.fsum(g.sizes[u] * g.edge_dep[(u, v)] for u in g.prereqs(v) if u in upskilled)
    share = shared / cfg.e_normal / trained
    threshold = (cfg.slowdown * trained - cfg.deadline) / denom
    return ThresholdCheck(share, threshold, novice_time(g, cfg, v, upskilled), share >= threshold - SLACK)


def lpp_accessible(g: TaskGraph, cfg: EcosystemConfig) -> AccessibilityReport:
    """Admit subtask types round by round until nothing new becomes reachable.

    Round 0 holds the trivially accessible types.  Round ``k`` admits every
    type a novice upskilled on rounds ``< k`` can finish before the deadline.
    """
    layer: dict[str, int] = {v: 0 for v in trivially_accessible(g, cfg)}
    rnd = 0
    while True:
        rnd += 1
        known = frozenset(layer)
        fresh = [
            v for v in g.order
            if v not in layer and novice_time(g, cfg, v, known) <= cfg.deadline + SLACK
        ]
        if not fresh:
            break
        for v in fresh:
            layer[v] = rnd

    final = frozenset(layer)
    nodes = {}
    for v in g.order:
        check = lpp_threshold(g, cfg, v, final)
        if v not in layer:
            status = INACCESSIBLE
        elif layer[v] == 0:
            status = TRIVIAL
        else:
            status = LPP
        nodes[v] = NodeAccess(status, upskilled_cost(g, cfg, v), check.upskilled_share, check.threshold, layer.get(v))
    return AccessibilityReport(MappingProxyType(nodes))


@dataclass(frozen=True)
class OnionLayers:
    layers: tuple[tuple[str, ...], ...]
    inaccessible: tuple[str, ...]


def onion_layers(g: TaskGraph, cfg: EcosystemConfig) -> OnionLayers:
    report = lpp_accessible(g, cfg)
    depth = max((a.layer for a in report.nodes.values() if a.layer is not None), default=-1)
    layers = tuple(
        tuple(sorted(v for v, a in report.nodes.items() if a.layer == k)) for k in range(depth + 1)
    )
    lost = tuple(sorted(v for v, a in report.nodes.items() if a.layer is None))
    return OnionLayers(layers, lost)


def report_json(report: AccessibilityReport, cfg: EcosystemConfig) -> str:
    payload = {
        "config": {"e_normal": cfg.e_normal, "slowdown": cfg.slowdown, "deadline": cfg.deadline},
        "nodes": report.to_dict(),
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def report_dot(g: TaskGraph, report: AccessibilityReport) -> str:
    """Graphviz source with one rank per admission round."""
    colors = {TRIVIAL: "palegreen", LPP: "lightskyblue", INACCESSIBLE: "lightgray"}
    lines = ["digraph lpp {", "  rankdir=LR;", "  node [style=filled];"]
    by_layer: dict[int | None, list[str]] = {}
    for v, a in report.nodes.items():
        by_layer.setdefault(a.layer, []).append(v)
    for key in sorted(by_layer, key=lambda k: (k is None, k or 0)):
        name = "inaccessible" if key is None else f"layer_{key}"
        lines.append(f"  subgraph cluster_{name} {{")
        lines.append(f'    label="{name}";')
        lines.append("    rank=same;")
        for v in sorted(by_layer[key]):
            a = report.nodes[v]
            lines.append(
                f'    "{v}" [fillcolor={colors[a.status]}, '
                f'label="{v}\\ntime={a.upskilled_time:.4g} share={a.upskilled_share:.4g}"];'
            )
        lines.append("  }")
    for u, v in g.edges:
        lines.append(f'  "{u}" -> "{v}" [label="{g.edge_dep[(u, v)]:.4g}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
