import numpy as np
import pytest

from gradcert import GaussianStream, make_quadratic_composite


def seeded_gaussian(seed, shape):
    return GaussianStream(seed).normal(shape)


def seeded_quad(seed=11, m=20, n=50):
    """Consistent least-squares composite with a seeded Gaussian matrix."""
    stream = GaussianStream(seed)
    a = stream.normal((m, n))
    return make_quadratic_composite(a, a @ stream.normal(n))


@pytest.fixture(scope="session")
def quad_20x50():
    return seeded_quad(11, 20, 50)


def sample_avoiding(lo, hi, n, exclusions, radius):
    """1-D grid on [lo, hi] with points near any exclusion dropped."""
    xs = np.linspace(lo, hi, n)
    keep = np.ones(n, dtype=bool)
    for c in exclusions:
        keep &= np.abs(xs - c) > radius
    return xs[keep]
