import pytest
from hypothesis import settings

from graphhardy.families import halfline_dirichlet
from graphhardy.hardy import construct_weight, halfline_supersolutions
from graphhardy.schrodinger import SchrodingerOperator

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


def record(criterion: int, ok: bool, detail: str) -> None:
    line = f"criterion {criterion:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split(":")[0].split()[1])):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def halfline_H():
    return SchrodingerOperator(halfline_dirichlet())


@pytest.fixture(scope="session")
def halfline_w(halfline_H):
    return construct_weight(halfline_H, *halfline_supersolutions())
