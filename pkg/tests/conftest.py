import pytest

from khtot import corpus
from khtot.diagram import parse_pd

TREFOIL_PD = "PD[X(1,4,2,5),X(3,6,4,1),X(5,2,6,3)]"


@pytest.fixture(scope="session")
def trefoil():
    return corpus.get("trefoil")


@pytest.fixture(scope="session")
def figure8():
    return corpus.get("figure8")


@pytest.fixture(scope="session")
def pd_trefoil():
    return parse_pd(TREFOIL_PD)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(results):
        terminalreporter.write_line(results[name])
