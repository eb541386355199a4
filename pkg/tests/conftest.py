import sys

import numpy as np
import pytest

from bernoulli_ide.problemfile import load_builtin


@pytest.fixture(scope="session")
def example1():
    return load_builtin("example1").problem


@pytest.fixture(scope="session")
def example2():
    return load_builtin("example2").problem


@pytest.fixture(scope="session")
def population():
    return load_builtin("population").problem


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
