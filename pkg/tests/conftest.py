import pytest

from sbsqbm.params import ModelParams, ThermalTime
from sbsqbm.special import FrequencyWindow


@pytest.fixture
def params():
    return ModelParams()


@pytest.fixture
def window():
    return FrequencyWindow(10.0, 20.0, 1.0)


@pytest.fixture
def hot(params):
    # k_B T = 2000 >> hbar omega_U = 20
    return ThermalTime.from_temperature(2000.0, params)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
