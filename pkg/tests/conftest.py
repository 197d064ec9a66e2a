import os

import numpy as np
import pytest
from hypothesis import settings


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


settings.register_profile("stress", max_examples=3000)
settings.register_profile("default", derandomize=True, max_examples=200, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

CRITERIA = pytest.StashKey[dict]()
N_CRITERIA = 13


@pytest.fixture
def criterion(request):
    """Record an acceptance verdict, then assert it."""
    store = request.config.stash.setdefault(CRITERIA, {})

    def record(number, ok, detail=""):
        store.setdefault(number, []).append((bool(ok), detail))
        assert ok, f"criterion {number}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter, config):
    store = config.stash.get(CRITERIA, None)
    if store is None:
        return
    terminalreporter.section("acceptance criteria")
    for number in range(1, N_CRITERIA + 1):
        checks = store.get(number)
        if not checks:
            terminalreporter.write_line(f"criterion {number:2d}: FAIL (not completed)")
            continue
        ok = all(c for c, _ in checks)
        details = "; ".join(d for _, d in checks if d)
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {details}")
