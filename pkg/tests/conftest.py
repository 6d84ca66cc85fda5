import pytest

_VERDICTS = []


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line per acceptance criterion and assert it."""
    calls = []

    def verdict(number, title, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number:>2}: {title}"
        if detail:
            line += f" ({detail})"
        calls.append(line)
        _VERDICTS.append(line)
        print(line)
        assert ok, line

    yield verdict
    if not calls:
        _VERDICTS.append(f"FAIL {request.node.name}: raised before reaching a verdict")


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in _VERDICTS:
            terminalreporter.write_line(line)
