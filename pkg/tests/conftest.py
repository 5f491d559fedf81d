import random

import pytest
from hypothesis import HealthCheck, settings

from tribes.groupoid import Groupoid

settings.register_profile(
    "repo",
    deadline=None,
    derandomize=True,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


@pytest.fixture
def rng():
    return random.Random(1234)


def z2_missing_inverse():
    """Z2 whose inverse table forgets ``s``."""
    return Groupoid(
        ["*"],
        {"1": ("*", "*"), "s": ("*", "*")},
        {"*": "1"},
        {"1": "1"},
        composition={("1", "1"): "1", ("1", "s"): "s", ("s", "1"): "s", ("s", "s"): "1"},
    )


ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
