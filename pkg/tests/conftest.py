from fractions import Fraction

import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from duality_lab import exactnum as xn
from duality_lab.manybody import PhasePoint

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("default")


def fractions(bound: int = 9, nonzero: bool = False):
    """Small rationals ``a/b`` with ``|a|, b <= bound``."""
    out = st.builds(Fraction, st.integers(-bound, bound), st.integers(1, bound))
    return out.filter(bool) if nonzero else out


def distinct_fractions(n: int, bound: int = 9, nonzero: bool = False):
    return st.lists(fractions(bound, nonzero), min_size=n, max_size=n, unique=True)


def rational_matrices(n: int, bound: int = 9):
    return st.lists(fractions(bound), min_size=n * n, max_size=n * n).map(
        lambda v: xn.exact_array(v).reshape(n, n))


@pytest.fixture
def cm_example():
    """Rational CM point with ``L = [[2, -1], [1, 3]]``."""
    return PhasePoint(xn.exact_array([0, 1]), xn.exact_array([2, 3]), Fraction(1))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


#: criterion lines recorded by the acceptance suite, echoed after the run
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
