import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "catk", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("catk")

REGIMES = (1.0, -1.0, 0.0)
CURVED = (1.0, -1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def half_pi_cap(K: float):
    return 0.5 * math.pi / math.sqrt(K) if K > 0 else None


ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = []


@pytest.fixture
def acceptance(request):
    """Record ``(criterion, passed, detail)`` for the end-of-run summary."""
    log = request.config.stash[ACCEPTANCE]

    def record(number: int, passed: bool, detail: str):
        line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        log.append((number, line))
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = config.stash.get(ACCEPTANCE, [])
    if log:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(log):
            terminalreporter.write_line(line)
