import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=1000)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# one line per acceptance criterion, filled in by test_acceptance
ACCEPTANCE_LINES = []


@pytest.fixture
def record_criterion():
    def rec(number, ok, detail):
        ACCEPTANCE_LINES.append((number, ok, detail))
    return rec


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number, ok, detail in sorted(ACCEPTANCE_LINES):
        tr.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
