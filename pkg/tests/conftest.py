import random

import numpy as np
import pytest

from rowham.latin import LatinSquare


def pytest_addoption(parser):
    parser.addoption(
        "--runslow",
        action="store_true",
        default=False,
        help="run the opt-in slow suites (full-range goldens, large named squares, witness windows)",
    )


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: opt-in long-running suite (enable with --runslow)")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


def random_square(n: int, seed: int) -> LatinSquare:
    """Random isotope of the cyclic table: valid, cheap, seed-stable."""
    rng = random.Random(seed)
    rows = list(range(n))
    cols = list(range(n))
    syms = list(range(n))
    for perm in (rows, cols, syms):
        rng.shuffle(perm)
    i = np.arange(n)
    base = (i[:, None] + i[None, :]) % n
    cells = np.empty((n, n), dtype=np.int64)
    for r in range(n):
        for c in range(n):
            cells[rows[r], cols[c]] = syms[base[r, c]]
    return LatinSquare(cells)
