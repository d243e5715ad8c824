"""Shared test setup.

Every test runs on the numpy backend so results are deterministic and
independent of whether numba is installed; the backend tests opt back
in explicitly.  The acceptance module additionally gets a one-line
PASS/FAIL summary per criterion at the end of the run.
"""

import pytest

from gvflat import set_backend


@pytest.fixture(autouse=True)
def numpy_backend():
    set_backend("numpy")
    yield
    set_backend("numpy")


_acceptance_outcomes = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        _acceptance_outcomes[report.nodeid] = report.outcome


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid in sorted(_acceptance_outcomes):
        outcome = _acceptance_outcomes[nodeid]
        word = {"passed": "PASS", "failed": "FAIL"}.get(outcome, outcome.upper())
        terminalreporter.write_line(f"{word}  {nodeid.split('::')[-1]}")
