"""Acceptance bookkeeping: one PASS/FAIL line per criterion in the terminal summary."""
from collections import defaultdict

import pytest

_titles = {}
_outcomes = defaultdict(list)
_notes = defaultdict(list)


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            number, title = mark.args
            _titles[number] = title


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _outcomes[mark.args[0]].append((item.name, rep.passed))


@pytest.fixture
def note(request):
    """Attach a free-text line to the criterion of the current test."""
    mark = request.node.get_closest_marker("criterion")

    def _note(text):
        _notes[mark.args[0]].append(text)
        print(text)

    return _note


def pytest_terminal_summary(terminalreporter):
    if not _titles:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_titles):
        results = _outcomes.get(number, [])
        if not results:
            status = "NOT RUN"
        else:
            status = "PASS" if all(ok for _, ok in results) else "FAIL"
        failed = [name for name, ok in results if not ok]
        line = f"{status:7s} criterion {number}: {_titles[number]} ({len(results)} checks)"
        if failed:
            line += " failed: " + ", ".join(failed)
        tr.write_line(line)
        for text in _notes.get(number, []):
            tr.write_line(f"        {text}")
