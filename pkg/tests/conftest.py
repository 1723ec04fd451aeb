import json
import sys
from importlib import resources
from pathlib import Path

import pytest

from truthful_arch.core import validate_scenario

sys.path.insert(0, str(Path(__file__).parent))


def load_fixture(name):
    text = (resources.files("truthful_arch") / "fixtures" / f"{name}.json").read_text()
    return validate_scenario(json.loads(text))


@pytest.fixture(scope="session")
def fixture():
    return load_fixture


@pytest.fixture(scope="session")
def table1():
    return load_fixture("table1")


@pytest.fixture(scope="session")
def table2():
    return load_fixture("table2")


@pytest.fixture(scope="session")
def table3():
    return load_fixture("table3")


_CRITERIA = []


@pytest.fixture
def criterion():
    """Marks a test as an acceptance criterion; its first docstring line is reported."""


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if "criterion" in getattr(item, "fixturenames", ()) and report.when == "call":
        doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
        _CRITERIA.append(("PASS" if report.passed else "FAIL", doc))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for status, doc in _CRITERIA:
        terminalreporter.write_line(f"{status}  {doc}")
