import sys
from pathlib import Path

import pytest

from wgsum.graph import WeightedGraph

sys.path.insert(0, str(Path(__file__).parent))


def make_g1():
    # labels 1..4 map to ids 0..3
    return WeightedGraph.from_labeled_edges([(1, 3, 2.0), (2, 3, 2.0), (1, 4, 4.0), (2, 4, 4.0)])


@pytest.fixture
def g1():
    return make_g1()


ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} -- {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
