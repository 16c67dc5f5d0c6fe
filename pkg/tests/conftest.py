"""Shared pytest hooks: collect acceptance lines for the terminal summary."""

RESULTS = []


def record(line: str) -> None:
    RESULTS.append(line)


def pytest_terminal_summary(terminalreporter):
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
