"""Shared pytest plumbing: surfaces the acceptance criterion results in the
terminal summary so they are visible without disabling output capture."""

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
