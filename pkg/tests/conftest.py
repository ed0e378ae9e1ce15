import functools

import numpy as np
import pytest

from interlace.catalog import PRESETS, solve_spec
from interlace.darboux import build_family


@functools.lru_cache(maxsize=None)
def solved(name):
    return solve_spec(PRESETS[name])


@functools.lru_cache(maxsize=None)
def family(c0, c1, lam, levels=6):
    return build_family(c0, c1, lam, levels=levels)


@pytest.fixture(scope="session")
def solve_preset():
    return solved


@pytest.fixture(scope="session")
def darboux_family():
    return family


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import LINES
    except ImportError:
        return
    if LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(LINES):
            terminalreporter.write_line(LINES[k])
