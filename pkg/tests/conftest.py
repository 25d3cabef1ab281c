import numpy as np
import pytest

import isolume

# Criterion results collected by test_acceptance.py; echoed at the end of
# the run so the pass/fail lines are visible even with captured stdout.
ACCEPTANCE_RESULTS: list[tuple[int, str, bool]] = []


def record_criterion(number: int, description: str, passed: bool) -> None:
    ACCEPTANCE_RESULTS.append((number, description, passed))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, description, passed in sorted(ACCEPTANCE_RESULTS):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d} {status}  {description}")


@pytest.fixture
def atlas():
    return isolume.builtin_atlas()


@pytest.fixture
def empty_obstacles():
    def make(width, height):
        return isolume.ObstacleMap(np.zeros((height, width), bool))

    return make
