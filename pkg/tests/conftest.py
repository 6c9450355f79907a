from __future__ import annotations

import pytest

_ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def criterion():
    """Record the pass/fail line of an acceptance criterion and return the flag."""

    def record(number: int, title: str, ok: bool, detail: str) -> bool:
        _ACCEPTANCE[number] = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[n])
