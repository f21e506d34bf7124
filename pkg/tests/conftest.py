from __future__ import annotations

import numpy as np
import pytest

_LINES: list[str] = []


@pytest.fixture
def report():
    """Record one pass/fail line for an acceptance criterion."""

    def _report(number: int, title: str, ok: bool, detail: str, elapsed: float, limit: float):
        status = "PASS" if ok and elapsed < limit else "FAIL"
        line = f"[{status}] AC{number:02d} {title}: {detail}; {elapsed:.2f}s (limit {limit:g}s)"
        _LINES.append(line)
        print(line)
        return status == "PASS"

    return _report


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_LINES):
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


