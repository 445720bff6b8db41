import math

import pytest
from hypothesis import HealthCheck, settings

from fractalcalc.verification import default_columns

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", max_examples=400, deadline=None)
settings.load_profile("default")

CANTOR_ALPHA = math.log(2) / math.log(3)
KOCH_ALPHA = math.log(4) / math.log(3)


@pytest.fixture(scope="session")
def columns():
    return default_columns()


@pytest.fixture(scope="session")
def set_column(columns):
    return columns[0]


@pytest.fixture(scope="session")
def curve_column(columns):
    return columns[1]


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
