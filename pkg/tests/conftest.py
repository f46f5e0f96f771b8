"""Shared pytest hooks.

The acceptance tests record one verdict line per criterion; stdout is
captured per test, so the lines are echoed again here in a terminal
section after the run, where capture no longer applies.
"""

VERDICT_LINES: list[str] = []


def record_verdict(line: str) -> None:
    VERDICT_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if not VERDICT_LINES:
        return
    terminalreporter.section("acceptance matrix")
    for line in VERDICT_LINES:
        terminalreporter.write_line(line)
