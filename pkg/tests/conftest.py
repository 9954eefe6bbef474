"""Collects acceptance sub-test outcomes and prints one verdict per criterion."""

import re
from collections import defaultdict

_CRITERION = re.compile(r"test_criterion_(\d+)_")
_outcomes = defaultdict(list)


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if m is None:
        return
    if report.when == "call" or (report.when == "setup" and report.failed):
        name = report.nodeid.split("::")[-1]
        _outcomes[int(m.group(1))].append((name, report.passed))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_outcomes):
        failed = [name for name, ok in _outcomes[n] if not ok]
        verdict = "FAIL" if failed else "PASS"
        detail = f" ({', '.join(failed)})" if failed else ""
        terminalreporter.write_line(f"criterion {n}: {verdict}{detail}")
