"""Shared acceptance reporting: one pass/fail line per criterion."""
import contextlib

import pytest

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    @contextlib.contextmanager
    def _criterion(number: int, description: str):
        info: dict[str, str] = {}
        try:
            yield info
        except BaseException:
            ACCEPTANCE_LINES.append(f"[FAIL] criterion {number}: {description}")
            raise
        line = f"[PASS] criterion {number}: {description}"
        if info.get("detail"):
            line += f" [{info['detail']}]"
        ACCEPTANCE_LINES.append(line)

    return _criterion


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
