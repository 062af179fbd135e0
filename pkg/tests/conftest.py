import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20260825)


def random_weights(rng, n):
    """Weight pair drawn from (0, 1], the range the solver produces."""
    wx = rng.uniform(0.05, 1.0, (n, n))
    wy = rng.uniform(0.05, 1.0, (n, n))
    return wx, wy
