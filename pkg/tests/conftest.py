import pytest
from hypothesis import HealthCheck, settings

from meinardus.weights import make_example2, make_example3, make_forest, make_power_law

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def ones():
    return make_power_law(1, 1)


@pytest.fixture(scope="session")
def linear():
    return make_power_law(1, 2)


@pytest.fixture(scope="session")
def example2():
    return make_example2()


@pytest.fixture(scope="session")
def example3():
    return make_example3()


@pytest.fixture(scope="session")
def forest():
    return make_forest()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
