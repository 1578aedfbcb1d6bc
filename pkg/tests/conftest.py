import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


def random_monic(rng, degree, spread=1.5):
    """Monic polynomial with roots drawn uniformly from a disc."""
    from skizze.poly import from_roots

    roots = spread * (rng.uniform(-1, 1, degree) + 1j * rng.uniform(-1, 1, degree))
    return from_roots(roots), roots
