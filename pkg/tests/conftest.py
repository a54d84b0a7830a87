import pytest
from hypothesis import settings

from kerrmag.experiments import scenario_catalog

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture(scope="session")
def catalog():
    return scenario_catalog()


@pytest.fixture(scope="session")
def fig2a(catalog):
    return catalog["fig2a"]


@pytest.fixture(scope="session")
def fig2a_mid(fig2a):
    """(params, pdc drives) at 175 mW, inside the bistable window."""
    return fig2a.configure_single(0.175, "pdc")


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import RESULTS
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
