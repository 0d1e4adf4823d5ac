"""Coordination index: the mean intensity of a set of work activities."""

from __future__ import annotations

import logging
from collections import defaultdict
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from ..errors import NoMatchingActivities
from .ingest import ActivityRecord

log = logging.getLogger(__name__)

DEFAULT_SUB_INDICES = (
    "Getting Information",
    "Monitor Processes, Materials, or Surroundings",
    "Processing Information",
    "Communicating with Supervisors, Peers, or Subordinates",
    "Organizing, Planning, and Prioritizing Work",
    "Coordinating the Work and Activities of Others",
)


def normalize_name(name: str) -> str:
    return " ".join(name.split()).casefold()


@dataclass(frozen=True)
class CoordinationIndex:
    values: dict[str, float]
    incomplete: dict[str, tuple[str, ...]] = field(default_factory=dict)


def build_coordination_index(
    activities: Iterable[ActivityRecord],
    sub_index_names: Sequence[str] = DEFAULT_SUB_INDICES,
    *,
    aliases: Mapping[str, str] | None = None,
    standardize_components: bool = False,
) -> CoordinationIndex:
    """Average the named activities' intensities per occupation.

    Names match after whitespace trimming and case folding; ``aliases`` maps
    alternative spellings onto requested names.  Occupations lacking any
    component are left out and listed in ``incomplete``.  Repeated rows for the
    same occupation and activity are averaged.  With
    ``standardize_components`` each component is z-scored across the complete
    occupations (unweighted) before averaging.
    """
    wanted = {normalize_name(n): n for n in sub_index_names}
    alias_map = {normalize_name(k): normalize_name(v) for k, v in (aliases or {}).items()}
    sums: dict[str, dict[str, list[float]]] = defaultdict(lambda: defaultdict(list))
    seen: set[str] = set()
    for rec in activities:
        seen.add(rec.occupation_code)
        key = normalize_name(rec.activity_name)
        key = alias_map.get(key, key)
        if key in wanted:
            sums[rec.occupation_code][key].append(rec.intensity)
    if not sums:
        raise NoMatchingActivities("no activity matches the requested sub-index names")

    order = list(wanted)
    complete: dict[str, list[float]] = {}
    incomplete = {}
    for code in sorted(seen):
        comps = sums.get(code, {})
        missing = tuple(wanted[k] for k in order if k not in comps)
        if missing:
            incomplete[code] = missing
            continue
        complete[code] = [float(np.mean(comps[k])) for k in order]
    if incomplete:
        log.warning("%d occupation(s) lack some sub-index and were excluded", len(incomplete))
    if not complete:
        raise NoMatchingActivities("no occupation has every requested sub-index")

    codes = sorted(complete)
    matrix = np.array([complete[c] for c in codes])
    if standardize_components:
        sd = matrix.std(axis=0)
        sd[sd == 0] = 1.0
        matrix = (matrix - matrix.mean(axis=0)) / sd
    values = matrix.mean(axis=1)
    return CoordinationIndex({c: float(x) for c, x in zip(codes, values)}, incomplete)
