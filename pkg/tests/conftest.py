import time

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

SUITE_START = time.perf_counter()


def pytest_collection_modifyitems(items):
    # The acceptance gate reports total suite runtime, so it runs last.
    items.sort(key=lambda item: item.path.name == "test_acceptance.py")


settings.register_profile(
    "suite",
    deadline=None,
    derandomize=True,
    max_examples=50,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")

NOMINAL = dict(r=0.1, l=2e-4, m=2e-5, lam=0.05)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def nominal():
    return dict(NOMINAL)
