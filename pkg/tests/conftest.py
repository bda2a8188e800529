import numpy as np
import pytest

from ckn_symbreak.constants import validate_params
from ckn_symbreak.spectral import RadialGrid, RadialProfile


@pytest.fixture(scope="session")
def grid():
    return RadialGrid.default()


@pytest.fixture(scope="session")
def gaussian4(grid):
    return RadialProfile.from_function(lambda r: np.exp(-0.5 * r ** 2), grid, 4)


@pytest.fixture(scope="session")
def params4():
    return validate_params(4, 0.5, 2.5)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda x: int(x.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
