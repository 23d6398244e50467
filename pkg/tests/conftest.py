import pytest

from tworay import DistanceInterval, LinkGeometry, NoiseModel, RadioConfig

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(key, title): acceptance criterion reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call" and not report.failed:
        return
    key, title = marker.args
    entry = _criteria.setdefault(key, {"title": title, "passed": True, "failures": []})
    if report.failed:
        entry["passed"] = False
        entry["failures"].append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_criteria):
        entry = _criteria[key]
        status = "PASS" if entry["passed"] else "FAIL"
        line = f"{key} {status}  {entry['title']}"
        if entry["failures"]:
            line += "  (failed: " + ", ".join(entry["failures"]) + ")"
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def ground():
    """Low receiver over flat ground, used by most worked cases."""
    return LinkGeometry(10.0, 1.5)


@pytest.fixture(scope="session")
def wifi():
    return RadioConfig(2.4e9)


@pytest.fixture(scope="session")
def link_budget():
    return RadioConfig(2.4e9, p_t=1e-3), NoiseModel(100e3, 3.0, -174.0)


@pytest.fixture(scope="session")
def short_range():
    return DistanceInterval(10.0, 100.0)
