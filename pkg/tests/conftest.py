"""Collects acceptance outcomes and prints one line per criterion at the end of the run."""

from collections import defaultdict

_results = defaultdict(list)
_titles = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by this test")


def pytest_itemcollected(item):
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        item.user_properties.append(("criterion", tuple(marker.args)))


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    # one entry per test: the call phase, or whichever phase failed or skipped
    if report.when == "call" or (report.when == "setup" and not report.passed):
        number, title = props["criterion"]
        _titles[number] = title
        details = [value for key, value in report.user_properties if key == "detail"]
        _results[number].append((report.outcome, report.nodeid, details))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_results):
        outcomes = _results[number]
        ok = all(outcome == "passed" for outcome, _, _ in outcomes)
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {_titles[number]}")
        for outcome, nodeid, details in outcomes:
            if outcome != "passed":
                terminalreporter.write_line(f"    {outcome}: {nodeid}")
            for detail in details:
                terminalreporter.write_line(f"    {detail}")
