import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20261014)


def correlated(rng, n, p):
    a = np.eye(p) + 0.4 * rng.standard_normal((p, p))
    return rng.standard_normal((n, p)) @ a.T
