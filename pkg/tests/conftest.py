import re

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_")
_results = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    n = int(m.group(1))
    failed = report.failed or (report.when == "call" and report.skipped)
    if failed:
        _results[n] = False
    elif report.when == "call":
        _results.setdefault(n, True)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_results):
        terminalreporter.write_line(f"ACCEPTANCE {n:2d} {'PASS' if _results[n] else 'FAIL'}")
