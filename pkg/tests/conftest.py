import pytest

_CRITERIA: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def record():
    """Store one pass/fail line for an acceptance criterion."""

    def _record(key: str, passed: bool, detail: str) -> bool:
        _CRITERIA[key] = (bool(passed), detail)
        return bool(passed)

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for key in sorted(_CRITERIA, key=lambda k: int(k.split()[0])):
        passed, detail = _CRITERIA[key]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  criterion {key}: {detail}")
