import numpy as np
import pytest

from fsbench.algebra import CStarAlgebra, cyclic_group
from fsbench.gallery import sys_m2, sys_triv, sys_tw
from fsbench.morita import mor_pair

_criteria: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    marker = _markers.get(report.nodeid)
    if marker is None:
        return
    n, title = marker
    ok = report.outcome == "passed"
    prev = _criteria.get(n, (title, True))
    _criteria[n] = (title, prev[1] and ok)


_markers: dict = {}


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            _markers[item.nodeid] = (m.args[0], m.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        title, ok = _criteria[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {title}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def triv():
    return sys_triv()


@pytest.fixture(scope="session")
def tw():
    return sys_tw()


@pytest.fixture(scope="session")
def m2sys():
    return sys_m2()


@pytest.fixture(scope="session")
def morpair():
    return mor_pair()


@pytest.fixture(scope="session")
def m2():
    return CStarAlgebra((2,))


@pytest.fixture(scope="session")
def z2():
    return cyclic_group(2)
