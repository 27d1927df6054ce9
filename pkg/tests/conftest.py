import os

import pytest

from askey_zeros import runner
from askey_zeros.families import family_names

GRID_DEGREES = range(2, 9)
GRID_DRAWS = 5
GRID_SEED = 42

_criteria: dict[str, tuple[str, str]] = {}


@pytest.fixture(scope="session")
def grid():
    """Every family, N = 2..8, five parameter draws: the shared acceptance sweep."""
    jobs = min(4, os.cpu_count() or 1)
    runs, summary = runner.sweep(family_names(), list(GRID_DEGREES), GRID_DRAWS, GRID_SEED, jobs=jobs)
    return runs, summary


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _criteria[props["criterion"]] = (report.outcome.upper(), props.get("detail", ""))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_criteria, key=lambda s: int(s.split()[0])):
        outcome, detail = _criteria[name]
        state = "PASS" if outcome == "PASSED" else "FAIL"
        terminalreporter.write_line(f"{state}  {name}: {detail}")
