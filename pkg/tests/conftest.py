import pytest
from hypothesis import HealthCheck, settings

from treetheta import omega, theta
from treetheta.trees import PLANAR, SYMMETRIC

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def sym_sk():
    return omega.omega_skeleton(omega.default_trees(SYMMETRIC), SYMMETRIC)


@pytest.fixture(scope="session")
def planar_sk():
    return omega.omega_skeleton(omega.default_trees(PLANAR), PLANAR)


@pytest.fixture(scope="session")
def theta2():
    return theta.theta_skeleton(2, 3)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
