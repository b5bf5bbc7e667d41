import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from permchan import validate_channel

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def stochastic_matrices(draw, min_rows=2, max_rows=4, min_cols=2, max_cols=5, positive=False):
    m = draw(st.integers(min_rows, max_rows))
    k = draw(st.integers(min_cols, max_cols))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    a = rng.dirichlet(np.ones(k), size=m)
    if positive:
        a = 0.9 * a + 0.1 / k
    elif draw(st.booleans()):
        # sprinkle zeros so non-positive paths get exercised
        mask = rng.random(a.shape) < 0.3
        mask[np.arange(m), rng.integers(0, k, m)] = False
        a = np.where(mask, 0.0, a)
        a = a / a.sum(axis=1, keepdims=True)
    return validate_channel(a)


def random_channel(rng, m, k, positive=True):
    a = rng.dirichlet(np.ones(k), size=m)
    if positive:
        a = 0.95 * a + 0.05 / k
    return validate_channel(a)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
