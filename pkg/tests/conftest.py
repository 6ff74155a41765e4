from __future__ import annotations

import functools

import pytest

from rational_painleve.boutroux import solve_at
from rational_painleve.elliptic_data import period_record
from rational_painleve.gridstore import build_grid


@functools.lru_cache(maxsize=None)
def solved(x0: complex):
    """Configuration and period record at x0, shared across tests."""
    config = solve_at(complex(x0))
    return config, period_record(config)


@pytest.fixture(scope="session")
def small_grid():
    return build_grid(n_rays=12, n_radial=12, margin=0.05)


@pytest.fixture(scope="session")
def full_grid():
    """Default 48 x 60 grid with margin 0.02; build time kept on the object."""
    import time

    start = time.perf_counter()
    cache = build_grid(n_rays=48, n_radial=60, margin=0.02)
    cache.metadata["build_seconds"] = time.perf_counter() - start
    return cache
