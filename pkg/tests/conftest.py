import pytest
from hypothesis import settings

from mgw import AffineWeylGroup, KLTable, PeriodicSystem

settings.register_profile("ci", max_examples=40, deadline=None, derandomize=True)
settings.load_profile("ci")


@pytest.fixture(scope="session")
def A1():
    return AffineWeylGroup.of_type("A1")


@pytest.fixture(scope="session")
def A2():
    return AffineWeylGroup.of_type("A2")


@pytest.fixture(scope="session")
def kl_A1():
    return KLTable.of_type("A1")


@pytest.fixture(scope="session")
def kl_A2():
    return KLTable.of_type("A2")


@pytest.fixture(scope="session")
def per_A1(kl_A1):
    return PeriodicSystem(kl_A1)


@pytest.fixture(scope="session")
def per_A2(kl_A2):
    return PeriodicSystem(kl_A2)


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("MGW_CACHE", str(tmp_path / "cache"))


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.report_lines():
        terminalreporter.write_line(line)
