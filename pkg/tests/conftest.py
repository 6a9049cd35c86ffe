import numpy as np
import pytest

from xxzff.thermo import build_thermo


@pytest.fixture(scope="session")
def grid_pi3():
    return build_thermo(np.pi / 3, 0.25)


@pytest.fixture(scope="session")
def grid_ff():
    # free-fermion point
    return build_thermo(np.pi / 2, 0.25)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    # acceptance criterion verdicts are printed here so they survive capture
    try:
        from test_acceptance import CRITERION_LINES
    except ImportError:
        return
    if CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in CRITERION_LINES:
            terminalreporter.write_line(line)
