import pytest

_LINES = {}


@pytest.fixture
def criterion():
    """``criterion(number, passed, detail)`` records one acceptance verdict."""
    def record(number, passed, detail):
        _LINES[number] = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
        print(_LINES[number])
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance")
        for k in sorted(_LINES):
            terminalreporter.write_line(_LINES[k])
