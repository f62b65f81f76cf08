import pytest

from commex.graph import Graph


@pytest.fixture
def g1():
    """Triangle 0-1-2 plus the pendant edge 2-3."""
    return Graph.from_edges(4, [(0, 1), (1, 2), (0, 2), (2, 3)])


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
