import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from choiceaxioms.core import default_universe, enumerate_menus, make_profile

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def u3():
    return default_universe(3)


@pytest.fixture
def fam3(u3):
    return enumerate_menus(u3)


@pytest.fixture
def foil_profile():
    """env1 f:0, g:1; env2 f:3, g:0 (two hypotheses)."""
    return make_profile([[0.0, 1.0], [3.0, 0.0]])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for text in lines:
            terminalreporter.write_line(text)
