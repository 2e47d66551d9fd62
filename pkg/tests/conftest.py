import pytest
from hypothesis import HealthCheck, settings

from weilkit.liedata import catalog

settings.register_profile(
    "weilkit",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("weilkit")


@pytest.fixture(scope="session")
def su2():
    return catalog("su2")


@pytest.fixture(scope="session")
def so4():
    return catalog("so4")


@pytest.fixture(scope="session")
def so5():
    return catalog("so5")


def pytest_terminal_summary(terminalreporter):
    # the acceptance module records one line per criterion as it runs
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[n])
