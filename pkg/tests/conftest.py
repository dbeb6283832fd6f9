"""Collects the acceptance verdicts and prints them at the end of the run."""

ACCEPTANCE: dict[int, tuple[bool, str]] = {}
INFO: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE and not INFO:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
    for line in INFO:
        terminalreporter.write_line(f"info: {line}")
