import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import acceptance_log  # noqa: E402
from sscm.chan_gen import ChannelConfig  # noqa: E402

ALL_SCENARIOS = ("LOS_28_73", "NLOS_28", "NLOS_73", "NLOS_28_73")


@pytest.fixture
def rng():
    return np.random.default_rng(20151206)


@pytest.fixture(params=ALL_SCENARIOS)
def scenario_config(request):
    freq = 73e9 if request.param == "NLOS_73" else 28e9
    return ChannelConfig(scenario=request.param, carrier_frequency_hz=freq)


def pytest_terminal_summary(terminalreporter):
    if acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_log.LINES:
            terminalreporter.write_line(line)
