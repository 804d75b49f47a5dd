"""Collects acceptance-criterion verdicts and prints one line per criterion
at the end of the run, so a plain `pytest -v` always shows them."""

ACCEPTANCE_LINES = []


def record_criterion(number: int, name: str, passed: bool, elapsed: float) -> None:
    status = "PASS" if passed else "FAIL"
    line = f"[criterion {number}] {name}: {status} ({elapsed:.2f}s)"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
