import numpy as np
import pytest

from tricomilab.fields import Grid1D, InitialData

CRITERIA_LINES = []


def report(label, ok, detail):
    """Record one acceptance line; printed in the terminal summary."""
    CRITERIA_LINES.append(f"{'PASS' if ok else 'FAIL'} {label}: {detail}")
    return ok


def pytest_terminal_summary(terminalreporter):
    if CRITERIA_LINES:
        terminalreporter.section("acceptance criteria")
        for line in CRITERIA_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def small_grid():
    return Grid1D(30.0, 1024)


@pytest.fixture
def small_data(small_grid):
    return InitialData.bumps(small_grid, M=2.0, epsilon=1.0, radius=2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)
