import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_RESULTS: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def record():
    """``record(title, ok, detail)`` stores one acceptance line for the summary."""

    def _record(title: str, ok: bool, detail: str = "") -> None:
        _RESULTS[title] = (bool(ok), detail)
        print(f"{'PASS' if ok else 'FAIL'}  {title}" + (f"  -- {detail}" if detail else ""))

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for title in sorted(_RESULTS, key=lambda t: (int("".join(c for c in t.split()[0] if c.isdigit())), t)):
        ok, detail = _RESULTS[title]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {title}" + (f"  -- {detail}" if detail else ""))
