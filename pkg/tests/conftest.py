import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("atlas", deadline=None, derandomize=True,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("atlas")


@pytest.fixture(scope="session")
def inv_cache():
    """Zero inventories shared across test modules, keyed by (q, radius)."""
    from theta_atlas.complexzeros import find_all_zeros
    cache = {}

    def get(q, radius=55.0):
        key = (q, radius)
        if key not in cache:
            cache[key] = find_all_zeros(q, radius)
        return cache[key]
    return get


@pytest.fixture
def pure_env(monkeypatch):
    monkeypatch.setenv("THETA_ATLAS_PURE", "1")
    return os.environ


def pytest_terminal_summary(terminalreporter):
    from _util import ACCEPTANCE
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        status, title, detail, secs = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d} {status}  {title} [{secs:.1f} s] {detail}")
