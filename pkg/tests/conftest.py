import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "lab", deadline=None, max_examples=30,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("lab")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_configure(config):
    config.acceptance_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line[1])
