"""Collects ``@pytest.mark.acceptance(n, title)`` outcomes and prints one line per criterion."""

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_results: dict[int, dict] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        number, title = marker.args
        entry = _results.setdefault(number, {"title": title, "passed": True, "details": []})
        entry["passed"] &= report.passed
        entry["details"] += [str(v) for k, v in item.user_properties if k == "detail"]
        if report.failed:
            entry["details"].append(f"{item.name} failed")


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_results):
        e = _results[number]
        tag = "PASS" if e["passed"] else "FAIL"
        detail = "; ".join(e["details"])
        tr.write_line(f"[{tag}] {number:>2}. {e['title']}" + (f" ({detail})" if detail else ""))
