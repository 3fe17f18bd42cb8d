import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("wavemult", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("wavemult")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_field(grid, rng, mean_zero=False):
    vals = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    if mean_zero:
        vals -= vals.mean()
    return grid.field(vals)
