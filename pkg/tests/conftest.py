"""Prints one PASS/FAIL line per acceptance criterion after the run."""

import re

_results: dict[int, tuple[str, str, list[str]]] = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)", report.nodeid)
    if not m:
        return
    num = int(m.group(1))
    notes = [str(v) for k, v in report.user_properties if k == "note"]
    if report.when == "call" or report.failed:
        status = "PASS" if report.passed else "FAIL"
        if num not in _results or status == "FAIL":
            _results[num] = (status, m.group(2).replace("_", " "), notes)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_results):
        status, title, notes = _results[num]
        terminalreporter.write_line(f"criterion {num:2d} {status}: {title}")
        for note in notes:
            terminalreporter.write_line(f"    {note}")
