"""Shared pytest plumbing.

The acceptance tests record one line per criterion; the hook below prints
them as a block at the end of the run so every pass/fail verdict and its
measured margin is visible regardless of output capturing.
"""

import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record a criterion verdict and assert it."""

    def _record(number: int, passed: bool, detail: str) -> None:
        status = "PASS" if passed else "FAIL"
        ACCEPTANCE_LINES.append(f"criterion {number:2d} [{status}] {detail}")
        assert passed, f"criterion {number}: {detail}"

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
