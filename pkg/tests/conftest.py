from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from semiflag.datagen import get_store
from semiflag.semifield import ONE, RATIONAL, TROPICAL

settings.register_profile(
    "repo", deadline=None, derandomize=True, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")

SEMIFIELDS = [RATIONAL, TROPICAL, ONE]


def elements(sf):
    """Hypothesis strategy for raw elements of a built-in semifield."""
    if sf is RATIONAL:
        return st.builds(Fraction, st.integers(1, 50), st.integers(1, 50))
    if sf is TROPICAL:
        return st.integers(-40, 40)
    return st.just(1)


@pytest.fixture(params=SEMIFIELDS, ids=lambda s: s.name)
def sf(request):
    return request.param


@pytest.fixture(scope="session")
def a1():
    return get_store("A1")


@pytest.fixture(scope="session")
def a2():
    return get_store("A2")


# Acceptance lines are collected here and printed once at the end of the run
# so they survive output capture.
ACCEPTANCE = []


def record(number, title, ok, detail=""):
    line = f"criterion {number:>2} [{title}]: {'PASS' if ok else 'FAIL'}" + (f" ({detail})" if detail else "")
    ACCEPTANCE.append((number, line))
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
