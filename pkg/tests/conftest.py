import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

ACCEPTANCE_LINES = []


def random_game(rng, n, m, p_labeled=0.4, p_zero=0.0):
    """Random symmetric zero-diagonal W and a seed vector with >= 1 seed."""
    W = rng.random((n, n))
    if p_zero:
        W[rng.random((n, n)) < p_zero] = 0.0
    W = np.triu(W, 1)
    W = W + W.T
    seeds = np.where(rng.random(n) < p_labeled, rng.integers(0, m, n), -1)
    if not np.any(seeds >= 0):
        seeds[rng.integers(n)] = rng.integers(m)
    return W, seeds


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
