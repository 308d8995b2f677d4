"""Collects per-criterion outcomes from tests marked ``criterion`` and prints
one PASS/FAIL line per acceptance criterion at the end of the run."""
from collections import defaultdict

import pytest

_OUTCOMES: dict = defaultdict(list)
_TITLES: dict = {}
_NOTES: dict = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion a test belongs to")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    _TITLES[number] = title
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _OUTCOMES[number].append((item.name, rep.passed))
        for key, value in item.user_properties:
            if key == "note":
                _NOTES[number].append(value)


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_OUTCOMES):
        results = _OUTCOMES[number]
        ok = all(passed for _, passed in results)
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {_TITLES[number]}"
        failed = [name for name, passed in results if not passed]
        if failed:
            line += f"  (failing: {', '.join(failed)})"
        tr.write_line(line)
        for note in _NOTES[number]:
            tr.write_line(f"    {note}")
