"""Shared test fixtures.

The acceptance tests record one line per criterion through the
``criterion_log`` fixture; the terminal-summary hook replays those lines
at the end of the run so the pass/fail verdicts survive pytest's output
capture.
"""

import pytest

_LINES = []


@pytest.fixture
def criterion_log():
    def record(name, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  {name:<28s} {detail}"
        _LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in _LINES:
        terminalreporter.write_line(line)
