import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fuzzysuccess import default_construct  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"
_CRITERIA: list[tuple[int, str, bool, str]] = []


@pytest.fixture(scope="session")
def five():
    return default_construct("five_point")


@pytest.fixture(scope="session")
def seven():
    return default_construct("seven_point")


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion's outcome for the terminal summary."""
    marker = request.node.get_closest_marker("criterion")
    number, title = marker.args
    record = {"detail": ""}
    yield record
    failed = getattr(request.node, "_failed", True)
    _CRITERIA.append((number, title, not failed, record["detail"]))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item._failed = rep.failed


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(_CRITERIA):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {title}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
