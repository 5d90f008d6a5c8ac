import time

import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

_CRITERIA: list[str] = []


class CriterionReporter:
    """Times one acceptance criterion and records a pass/fail line."""

    def __init__(self, label):
        self.label = label
        self.detail = ""

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        self.elapsed = time.perf_counter() - self.t0
        status = "PASS" if exc_type is None else "FAIL"
        line = f"{status}  {self.label}  [{self.elapsed:.2f} s]"
        if self.detail:
            line += f"  {self.detail}"
        _CRITERIA.append(line)
        print(line)
        return False


@pytest.fixture
def criterion():
    return CriterionReporter


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)
