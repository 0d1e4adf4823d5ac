"""CSV ingestion for work-activity and occupation tables.

Malformed rows never abort a load: they are collected with their line numbers
and excluded.  A wrong header or an empty file is fatal.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Generic, TypeVar

from ..errors import EmptyFile, IoFailure, SchemaMismatch

log = logging.getLogger(__name__)

ACTIVITY_COLUMNS = ("occupation_code", "activity_name", "importance", "frequency")
OCCUPATION_COLUMNS = ("occupation_code", "median_hourly_wage", "employment")

T = TypeVar("T")


@dataclass(frozen=True)
class ActivityRecord:
    occupation_code: str
    activity_name: str
    importance: float
    frequency: float | None = None

    @property
    def intensity(self) -> float:
        if self.frequency is None:
            return self.importance
        return self.importance * self.frequency


@dataclass(frozen=True)
class OccupationRecord:
    occupation_code: str
    median_hourly_wage: float
    employment: float
    covariates: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class RowError:
    line: int
    message: str


@dataclass
class LoadResult(Generic[T]):
    records: list[T]
    errors: list[RowError]
    columns: tuple[str, ...] = ()


def _read(path: str | Path) -> tuple[list[str], list[tuple[int, list[str]]]]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None:
                raise EmptyFile(f"{path}: file is empty")
            rows = [(reader.line_num, row) for row in reader if any(cell.strip() for cell in row)]
    except OSError as exc:
        raise IoFailure(f"{path}: {exc}") from exc
    if not rows:
        raise EmptyFile(f"{path}: no data rows")
    return [h.strip() for h in header], rows


def _nonneg(raw: str, what: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise ValueError(f"{what} {raw!r} is not a number") from None
    if not math.isfinite(value) or value < 0:
        raise ValueError(f"{what} must be a nonnegative number, got {raw!r}")
    return value


def load_activities(path: str | Path) -> LoadResult[ActivityRecord]:
    header, rows = _read(path)
    if tuple(header) != ACTIVITY_COLUMNS:
        raise SchemaMismatch(f"{path}: expected header {','.join(ACTIVITY_COLUMNS)}, got {','.join(header)}")
    records, errors = [], []
    for line, row in rows:
        try:
            if len(row) != len(ACTIVITY_COLUMNS):
                raise ValueError(f"expected {len(ACTIVITY_COLUMNS)} fields, got {len(row)}")
            code, name, imp, freq = (cell.strip() for cell in row)
            if not code:
                raise ValueError("occupation_code is empty")
            if not name:
                raise ValueError("activity_name is empty")
            records.append(
                ActivityRecord(code, name, _nonneg(imp, "importance"), _nonneg(freq, "frequency") if freq else None)
            )
        except ValueError as exc:
            errors.append(RowError(line, str(exc)))
    for err in errors:
        log.warning("%s:%d: %s", path, err.line, err.message)
    return LoadResult(records, errors, ACTIVITY_COLUMNS)


def load_occupations(path: str | Path) -> LoadResult[OccupationRecord]:
    header, rows = _read(path)
    if tuple(header[:3]) != OCCUPATION_COLUMNS or len(set(header)) != len(header) or any(not h for h in header):
        raise SchemaMismatch(
            f"{path}: header must start with {','.join(OCCUPATION_COLUMNS)} followed by unique covariate names"
        )
    extra = tuple(header[3:])
    records, errors = [], []
    for line, row in rows:
        try:
            if len(row) != len(header):
                raise ValueError(f"expected {len(header)} fields, got {len(row)}")
            cells = [cell.strip() for cell in row]
            if not cells[0]:
                raise ValueError("occupation_code is empty")
            wage = _nonneg(cells[1], "median_hourly_wage")
            if wage <= 0:
                raise ValueError("median_hourly_wage must be positive")
            employment = _nonneg(cells[2], "employment")
            covariates = {}
            for name, raw in zip(extra, cells[3:]):
                try:
                    covariates[name] = float(raw)
                except ValueError:
                    raise ValueError(f"covariate {name} {raw!r} is not a number") from None
            records.append(OccupationRecord(cells[0], wage, employment, covariates))
        except ValueError as exc:
            errors.append(RowError(line, str(exc)))
    for err in errors:
        log.warning("%s:%d: %s", path, err.line, err.message)
    return LoadResult(records, errors, tuple(header))
