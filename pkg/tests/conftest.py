import random

import pytest
from hypothesis import settings

from kmonogenic.exact import ExactComplex

settings.register_profile("default", max_examples=25, deadline=None)
settings.load_profile("default")

# filled by test_acceptance; printed once at the end of the session
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return random.Random(20240601)


def gauss_int(rng, bound=3):
    return ExactComplex(rng.randint(-bound, bound), rng.randint(-bound, bound))
