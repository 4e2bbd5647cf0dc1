"""Shared fixtures: the acceptance-criteria result recorder.

Acceptance tests record one human-readable pass/fail line each; the lines
are replayed in a dedicated section of the terminal summary so a plain
``pytest`` run ends with the full criteria scoreboard.
"""

from __future__ import annotations

import pytest

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance():
    """Record one scoreboard line; also echoes it into the test's output."""

    def record(line: str) -> None:
        _ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
