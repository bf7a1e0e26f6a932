import pathlib

import pytest
from hypothesis import HealthCheck, settings

# Bisection and Monte-Carlo paths blow the default 200 ms deadline on slow CI
# boxes; wall-clock flakiness is not what these properties are about.
settings.register_profile(
    "qkdlimits",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("qkdlimits")


@pytest.fixture(scope="session")
def scenario_dir() -> pathlib.Path:
    return pathlib.Path(__file__).resolve().parent.parent / "scenarios"
