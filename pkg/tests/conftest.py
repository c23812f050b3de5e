import sys
import numpy as np
import pytest
from hypothesis import settings

from fracch.grid import PeriodicGrid
from fracch.rng import random_field

settings.register_profile("fracch", deadline=None, max_examples=25)
settings.load_profile("fracch")


@pytest.fixture(scope="session")
def grid():
    return PeriodicGrid(512, 40.0)


@pytest.fixture(scope="session")
def grid2pi():
    return PeriodicGrid(64, 2 * np.pi)


@pytest.fixture
def rand(grid):
    def make(seed, **kw):
        return random_field(grid, seed, **kw)
    return make


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
