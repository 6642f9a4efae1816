import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from racgdiv.coxeter import dihedral_line, gamma, omega  # noqa: E402


@pytest.fixture(scope="session")
def G1():
    return gamma(1)


@pytest.fixture(scope="session")
def G2():
    return gamma(2)


@pytest.fixture(scope="session")
def O1():
    return omega(1)


@pytest.fixture(scope="session")
def O2():
    return omega(2)


@pytest.fixture(scope="session")
def line():
    return dihedral_line()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
