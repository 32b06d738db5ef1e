import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from scws.pool import build_pool
from scws.weighted_set import from_pairs

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

weights = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False, allow_infinity=False)


@st.composite
def weighted_sets(draw, min_size=1, max_size=12, max_id=40):
    ids = draw(st.lists(st.integers(0, max_id), min_size=min_size, max_size=max_size, unique=True))
    ws = draw(st.lists(weights, min_size=len(ids), max_size=len(ids)))
    return from_pairs(zip(ids, ws))


@pytest.fixture(scope="session")
def pool():
    return build_pool()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance criteria register their outcome here; printed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
