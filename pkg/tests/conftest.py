import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from subgauss.dist import RandomVector, ScalarDist

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

RAD = ScalarDist.rademacher()
SQRT_LN2 = float(np.sqrt(np.log(2.0)))

unit = st.floats(-1.0, 1.0, allow_nan=False)
prob = st.floats(0.05, 0.95)


@st.composite
def scalar_dists(draw, max_atoms: int = 5) -> ScalarDist:
    k = draw(st.integers(1, max_atoms))
    vals = draw(st.lists(unit, min_size=k, max_size=k))
    w = draw(st.lists(st.floats(0.05, 1.0), min_size=k, max_size=k))
    return ScalarDist.from_arrays(vals, np.array(w) / sum(w))


@st.composite
def random_vectors(draw, max_n: int = 5, max_atoms: int = 8) -> RandomVector:
    n = draw(st.integers(1, max_n))
    a = draw(st.integers(1, max_atoms))
    pts = draw(st.lists(st.lists(unit, min_size=n, max_size=n), min_size=a, max_size=a))
    w = np.array(draw(st.lists(st.floats(0.05, 1.0), min_size=a, max_size=a)))
    return RandomVector(w / w.sum(), pts)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, filled in by tests/test_acceptance.py
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
