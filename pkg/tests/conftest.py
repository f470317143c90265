import os

from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=1000,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

import pytest


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False,
                     help="also run tests marked slow (full sweeps)")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow") or os.environ.get("PREPER_RUN_SLOW") == "1":
        return
    skip = pytest.mark.skip(reason="full sweep; run with --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


# one PASS/FAIL line per acceptance criterion, printed in the terminal summary
_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, title = mark.args
    prev = _CRITERIA.get(n, (title, "PASS"))[1]
    if rep.failed:
        status = "FAIL"
    elif rep.skipped:
        status = "SKIP" if prev == "PASS" else prev
    else:
        status = prev
    _CRITERIA[n] = (title, status)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        title, status = _CRITERIA[n]
        terminalreporter.write_line(f"{status} criterion {n}: {title}")
