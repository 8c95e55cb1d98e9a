import pytest

from spatial_aloha.model import Deterministic, Rain, Rayleigh, Renewal, Scenario, Slotted

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def base():
    return Scenario(lam=1.0, r=1.0, T=10.0, fading=Rayleigh(), mac=Slotted(0.05))


@pytest.fixture
def three_macs():
    return {"slotted": Slotted(0.05), "renewal": Renewal.from_tau(0.05), "rain": Rain(0.05)}


@pytest.fixture
def nofading(base):
    return base.replace(fading=Deterministic())


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
