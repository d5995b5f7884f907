import numpy as np
import pytest
from hypothesis import strategies as st

from ruinkit import new_distribution
from ruinkit.paper_examples import EX1, EX2, EX3, EX4, EX5, EX5_CORRECTED_PMF


def random_pmf(rng: np.random.Generator, m: int, mu_range=(0.05, 0.95), sparsity=0.3):
    """A valid pmf on {0..m} with f(m) > 0 and mean drawn from ``mu_range``."""
    mu = rng.uniform(*mu_range)
    raw = rng.dirichlet(np.ones(m))
    drop = rng.random(m) < sparsity
    drop[-1] = False
    raw[drop] = 0.0
    raw[-1] = max(raw[-1], 1e-6)
    raw /= raw.sum()
    f = raw * (mu / np.dot(np.arange(1, m + 1), raw))
    return [1.0 - f.sum(), *f]


@st.composite
def distributions(draw, max_m=10):
    seed = draw(st.integers(0, 2**32 - 1))
    m = draw(st.integers(2, max_m))
    return new_distribution(random_pmf(np.random.default_rng(seed), m))


@pytest.fixture(scope="session")
def examples():
    return {
        1: EX1.build(),
        2: EX2.build(),
        3: EX3.build(),
        4: EX4.build(),
        5: EX5.build(),
        "5c": new_distribution(list(EX5_CORRECTED_PMF)),
    }
