import functools
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from convexcov import fixtures  # noqa: E402
from convexcov.covariogram import covariogram_grid  # noqa: E402
from convexcov.oracle import GridOracle  # noqa: E402


@functools.lru_cache(maxsize=None)
def grid_oracle(name: str, n: int, reflected: bool = False) -> GridOracle:
    """Grid oracles are expensive, so every test module shares them."""
    K = fixtures.get(name)
    if reflected:
        K = K.reflect()
    return GridOracle(covariogram_grid(K, n, body_id=name))


@pytest.fixture(scope="session")
def grids():
    return grid_oracle


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
