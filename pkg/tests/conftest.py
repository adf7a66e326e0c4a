import re

_ACCEPTANCE = {}
_PATTERN = re.compile(r"test_criterion_(\d+)_(\w+)")


def pytest_runtest_logreport(report):
    m = _PATTERN.search(report.nodeid)
    if not m or "test_acceptance.py" not in report.nodeid:
        return
    key = (int(m.group(1)), m.group(2))
    failed = report.failed
    if report.when == "call" or failed:
        _ACCEPTANCE[key] = _ACCEPTANCE.get(key, False) or failed


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for (n, name), failed in sorted(_ACCEPTANCE.items()):
        status = "FAIL" if failed else "PASS"
        terminalreporter.write_line(f"criterion {n} [{status}] {name.replace('_', ' ')}")
