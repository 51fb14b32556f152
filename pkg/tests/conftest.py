import math
import os

import pytest
from hypothesis import HealthCheck, settings

from hardyz import WindowSpec

settings.register_profile(
    "hardyz",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "hardyz"))

DESK_T = 1e6
DESK_H = 1e3
X_GRID = (math.pi / 4, math.pi / 2)


@pytest.fixture(scope="session")
def desk_window():
    return WindowSpec(DESK_T, DESK_H)


@pytest.fixture
def threads(monkeypatch):
    """Set the kernel thread count for the duration of a test."""

    def set_threads(n):
        monkeypatch.setenv("HARDYZ_THREADS", str(n))

    return set_threads
