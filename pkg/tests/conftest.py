"""Collects the acceptance lines and prints them after the run."""

import pytest

LINES = []


@pytest.fixture
def report():
    def add(criterion, ok, detail):
        LINES.append(f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")
        return ok
    return add


def pytest_terminal_summary(terminalreporter):
    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
