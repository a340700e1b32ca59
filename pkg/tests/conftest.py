import os

import pytest
from hypothesis import HealthCheck, settings

from enriques_lattices.acceptance import Context

settings.register_profile(
    "repo",
    deadline=None,
    derandomize=True,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "repo"))

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def ctx():
    """One enumeration memo for the whole session (no on-disk cache)."""
    os.environ.pop("ENRIQUES_CACHE", None)
    return Context(quick=False, cache_dir=None)


@pytest.fixture(scope="session")
def genus(ctx):
    return ctx.enumeration


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
