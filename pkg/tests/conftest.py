import numpy as np
import pytest

from lpplfit import REFERENCE_PPI_PARAMS, SyntheticSpec, generate, monthly_timestamps


@pytest.fixture(scope="session")
def grid_1913_2012():
    return monthly_timestamps((1913, 1), (2012, 3))


@pytest.fixture(scope="session")
def paper_params():
    return REFERENCE_PPI_PARAMS


@pytest.fixture(scope="session")
def noiseless(grid_1913_2012, paper_params):
    return generate(SyntheticSpec(paper_params, grid_1913_2012))


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(20120317))


_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_log():
    """Record one verdict line; all lines are repeated in the terminal summary."""

    def log(criterion, passed, detail):
        line = f"ACCEPTANCE {criterion}: {'PASS' if passed else 'FAIL'} ({detail})"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return log


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
