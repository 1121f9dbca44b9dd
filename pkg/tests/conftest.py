import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

CRITERIA = {}


@pytest.fixture
def criterion(request):
    """Record a PASS/FAIL line for an acceptance criterion; printed in the terminal summary."""

    class Recorder:
        def __init__(self):
            self.detail = ""
            self.number = None

        def __call__(self, number, title):
            self.number = number
            CRITERIA[number] = (title, "FAIL", "")
            return self

        def note(self, detail):
            self.detail = detail

    rec = Recorder()
    yield rec
    if rec.number is not None:
        title, _, _ = CRITERIA[rec.number]
        failed = request.node.rep_call.failed if hasattr(request.node, "rep_call") else True
        CRITERIA[rec.number] = (title, "FAIL" if failed else "PASS", rec.detail)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(CRITERIA):
        title, status, detail = CRITERIA[k]
        terminalreporter.write_line(f"criterion {k:2d} {status}: {title}" + (f" -- {detail}" if detail else ""))
