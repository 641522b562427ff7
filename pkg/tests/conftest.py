import sys

import pytest

from epitopo.generators import binary_inputs, cards, single_facet, strip


@pytest.fixture
def square():
    return binary_inputs(2)


@pytest.fixture
def bin3():
    return binary_inputs(3)


@pytest.fixture
def strip3():
    return strip()


@pytest.fixture
def torus():
    return cards(4)


@pytest.fixture
def tri():
    return single_facet(3)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[num])
