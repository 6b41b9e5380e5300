from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from dbarlab.gaussian import WeightSequence

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.load_profile("default")


@pytest.fixture
def w():
    return WeightSequence.default()


@pytest.fixture
def w_odd():
    """Non-geometric weights, to catch formulas that only work for ratio 1/2."""
    return WeightSequence.explicit([Fraction(1, 3), Fraction(1, 5), Fraction(1, 7),
                                    Fraction(1, 11), Fraction(1, 13)])


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
