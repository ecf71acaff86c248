import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_ACCEPTANCE_LINES: dict[str, str] = {}


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion for the terminal summary."""

    def record(key: str, ok: bool, detail: str) -> bool:
        _ACCEPTANCE_LINES[key] = f"{key} {'PASS' if ok else 'FAIL'}  {detail}"
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_ACCEPTANCE_LINES, key=lambda k: int(k.split("-")[1].rstrip("ab"))):
        terminalreporter.write_line(_ACCEPTANCE_LINES[key])
