"""
Shared pytest fixtures
"""

import numpy as np
import pytest

from seeding import make_rng

# read-only reference material lives under examples/
collect_ignore = ["examples"]

TEST_SEED = 0x5EED


@pytest.fixture
def seed():
    return TEST_SEED


@pytest.fixture
def rng():
    """Fresh seeded generator per test"""
    return make_rng("tests", TEST_SEED)


@pytest.fixture
def sample_points():
    """100 seeded points in [-1, 1]^4"""
    return make_rng("points", TEST_SEED).uniform(-1.0, 1.0, size=(100, 4))


@pytest.fixture
def origin():
    return np.zeros(4)
