import pytest

_VERDICTS = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_VERDICTS] = []


@pytest.fixture
def verdict(request, capsys):
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def report(number: int, ok: bool, detail: str):
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number:>2}: {detail}"
        request.config.stash[_VERDICTS].append((number, line))
        with capsys.disabled():
            print(f"\n{line}")
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_VERDICTS, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
