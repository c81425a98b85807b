import pytest

ACCEPTANCE = {}


@pytest.fixture
def report():
    """Record one acceptance line, then assert it."""

    def _report(number, ok, detail):
        ACCEPTANCE[number] = (bool(ok), detail)
        assert ok, detail

    return _report


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")
