from itertools import combinations
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from hdxwalk.complex import build_from_top_faces
from hdxwalk.generators import complete_complex, random_pure_complex
from hdxwalk.io import load_complex

FIXTURES = Path(__file__).parent / "fixtures"

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def fixture_path(name: str) -> Path:
    return FIXTURES / name


@pytest.fixture(scope="session")
def triangle():
    return complete_complex(3, 2)[:2]


@pytest.fixture(scope="session")
def k4():
    return complete_complex(4, 2)[:2]


@pytest.fixture(scope="session")
def complete62():
    return complete_complex(6, 2)[:2]


@pytest.fixture(scope="session")
def complete73():
    return complete_complex(7, 3)[:2]


@pytest.fixture(scope="session")
def random12():
    return random_pure_complex(12, 2, 0.6, 7)[:2]


@pytest.fixture(scope="session")
def random93():
    return random_pure_complex(9, 3, 0.6, 1)[:2]


@pytest.fixture(scope="session")
def shipped():
    """Load a shipped fixture by name: (X, m, doc)."""
    return lambda name: load_complex(FIXTURES / f"{name}.json")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@st.composite
def weighted_complexes(draw, max_vertices=7, max_dim=3, integer_weights=False):
    """Pure complexes from a random nonempty set of top faces, with random top weights."""
    n = draw(st.integers(1, max_dim))
    nv = draw(st.integers(n + 1, max_vertices))
    cands = list(combinations(range(nv), n + 1))
    keep = draw(st.lists(st.sampled_from(cands), min_size=1, max_size=min(len(cands), 12), unique=True))
    if integer_weights:
        ws = draw(st.lists(st.integers(1, 9), min_size=len(keep), max_size=len(keep)))
    else:
        ws = draw(
            st.lists(
                st.floats(0.1, 10.0, allow_nan=False, allow_infinity=False),
                min_size=len(keep),
                max_size=len(keep),
            )
        )
    return build_from_top_faces(list(zip(keep, ws)))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for cid in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[cid])
