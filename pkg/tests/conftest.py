import time

import pytest

_LINES = []
_START = [0.0]


def pytest_sessionstart(session):
    _START[0] = time.perf_counter()


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def record(number, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number:>2}: {detail}"
        _LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for line in sorted(_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
        tr.write_line(line)
    elapsed = time.perf_counter() - _START[0]
    tr.write_line(f"suite runtime {elapsed:.1f} s (target < 30 s)")
