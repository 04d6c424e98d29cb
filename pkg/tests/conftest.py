import mpmath
import pytest

_CRITERIA = {}  # number -> [title, outcome]


@pytest.fixture(autouse=True)
def _reset_mpmath():
    # tests build oracles in the global mpmath context
    yield
    mpmath.mp.dps = 15


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")


def pytest_collection_modifyitems(config, items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            n, title = mark.args
            _CRITERIA[n] = [title, "not run"]


def pytest_runtest_logreport(report):
    if not report.nodeid.split("::")[0].endswith("test_acceptance.py"):
        return
    n = _CRITERIA_BY_NODE.get(report.nodeid)
    if n is None:
        return
    entry = _CRITERIA[n]
    if report.failed:
        entry[1] = "FAIL"
    elif report.when == "call" and report.passed and entry[1] != "FAIL":
        entry[1] = "PASS"
    elif report.skipped and entry[1] == "not run":
        entry[1] = "SKIP"


_CRITERIA_BY_NODE = {}


@pytest.hookimpl(trylast=True)
def pytest_itemcollected(item):
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        _CRITERIA_BY_NODE[item.nodeid] = mark.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        title, outcome = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:2d}  {outcome:<7s} {title}")
