"""Shared fixtures and the acceptance summary printer."""

import numpy as np
import pytest

# criterion number -> (status, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def record(criterion, status, detail):
    ACCEPTANCE[criterion] = (status, detail)
    print(f"CRITERION {criterion}: {status} ({detail})")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        status, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"CRITERION {k}: {status} ({detail})")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
