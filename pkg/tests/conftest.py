import numpy as np
import pytest

from vipkit.physics import StripGeometry
from vipkit.sensitivity import RunPlan, SensitivityReport
from vipkit.spectrum import BackgroundModel, DetectorModel, make_edges

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def plan():
    return RunPlan(current_I=10.0, duration_T=2000.0, duty_on_fraction=0.5)


@pytest.fixture
def sens_for_signal():
    """Report scaled so that beta2_half = 1 means one expected count."""

    def make(capture=0.1):
        return SensitivityReport(n_new=1.0 / capture, n_int=1.0, capture_fraction=capture)

    return make


@pytest.fixture
def edges():
    return make_edges(5.0, 10.0, 0.05)
