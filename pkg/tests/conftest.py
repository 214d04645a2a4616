"""Shared randomized-instance generators for the test suite."""
import numpy as np
import pytest

from logheat import make_gaussian_mixture, make_perturbed


def random_perturbed(rng):
    """Random 1D perturbed log-concave instance with alpha in [0.2, 4] and
    Lipschitz constant in [0, 2]."""
    alpha = rng.uniform(0.2, 4.0)
    lip = rng.uniform(0.0, 2.0)
    n_h = rng.integers(1, 4)
    h_knots = np.sort(rng.uniform(-2.0, 2.0, size=n_h))
    h_slopes = rng.uniform(-lip, lip, size=n_h + 1)
    n_v = rng.integers(0, 3)
    v_knots = np.sort(rng.uniform(-2.0, 2.0, size=n_v))
    v_slopes = np.sort(rng.uniform(-1.5, 1.5, size=n_v + 1))
    return make_perturbed(alpha, v_knots, v_slopes, h_knots, h_slopes, lip=lip)


def random_mixture(rng, dim=1, max_components=4):
    k = int(rng.integers(1, max_components + 1))
    comps = [
        (float(rng.uniform(0.2, 1.0)),
         rng.uniform(-3.0, 3.0, size=dim),
         float(rng.uniform(0.3, 2.5)))
        for _ in range(k)
    ]
    return make_gaussian_mixture(comps, dim=dim)


def random_atomic(rng, max_atoms=5):
    from logheat import AtomicMeasure

    k = int(rng.integers(1, max_atoms + 1))
    locs = np.sort(rng.uniform(-4.0, 4.0, size=k))
    while np.any(np.diff(locs) < 1e-6):
        locs = np.sort(rng.uniform(-4.0, 4.0, size=k))
    w = rng.uniform(0.2, 1.0, size=k)
    w = w / w.sum()
    return AtomicMeasure(dim=1, weights=w, locations=locs[:, None])


@pytest.fixture
def rng():
    return np.random.default_rng(20260824)
