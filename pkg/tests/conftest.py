"""Shared pytest wiring: a summary block with one line per acceptance test."""


def pytest_terminal_summary(terminalreporter):
    rows = []
    for reports in terminalreporter.stats.values():
        for rep in reports:
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py" not in nodeid or getattr(rep, "when", "") != "call":
                continue
            status = "PASS" if rep.passed else "FAIL"
            rows.append((nodeid.split("::")[-1].removeprefix("test_"), status))
    if rows:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name, status in sorted(rows):
            terminalreporter.write_line(f"[{status}] {name}")
