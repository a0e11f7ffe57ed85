import numpy as np
import pytest

from bohmrep.grids import Grid1D

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def xgrid():
    return Grid1D.centered(1024, 80.0)


@pytest.fixture(scope="session")
def small_grid():
    return Grid1D.centered(256, 40.0)


@pytest.fixture
def rng():
    return np.random.default_rng(7)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
