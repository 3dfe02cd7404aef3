import math

import pytest
from hypothesis import HealthCheck, settings

from mslab.distributions import ContinuousParent

settings.register_profile("default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

SQRT3 = math.sqrt(3.0)


@pytest.fixture
def gaussian():
    return ContinuousParent.gaussian(0.0, 1.0)


@pytest.fixture
def exponential():
    return ContinuousParent.exponential(1.0)


@pytest.fixture
def unit_uniform():
    return ContinuousParent.uniform(0.0, 1.0)
