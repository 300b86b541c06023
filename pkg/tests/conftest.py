import pytest

_ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def acceptance():
    """Record one summary line per acceptance criterion."""

    def record(number: int, ok: bool, detail: str) -> bool:
        _ACCEPTANCE[number] = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(_ACCEPTANCE[number])
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[number])
