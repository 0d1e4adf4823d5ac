from __future__ import annotations

import math
from pathlib import Path

import pytest

import taskgraph_works
from taskgraph_works.model import TaskGraph, WorkerPool, validate_graph

DATA = Path(taskgraph_works.__file__).parent / "data"
GOLDEN_D = (3 - math.sqrt(5)) / 2


@pytest.fixture
def data_dir() -> Path:
    return DATA


def single_node(size: float, d: float) -> TaskGraph:
    return validate_graph([("v", size, d)])


def three_workers(t: float = 5.0) -> WorkerPool:
    return WorkerPool.homogeneous(3, t)


ACCEPTANCE_RESULTS: dict[int, tuple[str, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        status, title = ACCEPTANCE_RESULTS[n]
        terminalreporter.write_line(f"criterion {n:>2}: {status}  {title}")
