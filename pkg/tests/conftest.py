"""Prints one PASS/FAIL line per acceptance criterion at the end of the run."""

_results = []


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    detail = "; ".join(str(v) for k, v in report.user_properties if k == "detail")
    _results.append((report.nodeid.split("::")[-1], report.outcome, detail))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome, detail in sorted(_results, key=lambda r: int(r[0].split("_")[2])):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  {name}  {detail}")
