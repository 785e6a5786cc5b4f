import math

import numpy as np
import pytest

from catfix.geometry import Space, sample_ball


SPACES = {
    "euclidean": Space.euclidean(2),
    "sphere": Space.sphere(2, 1.0),
    "hyperbolic": Space.hyperbolic(2, -1.0),
}


def random_point(space, rng, radius=None):
    """Random point near the basepoint; spheres stay inside the open hemisphere."""
    if radius is None:
        radius = 0.45 * space.diameter if space.kind == "sphere" else 2.0
    return sample_ball(space, space.basepoint(), radius, rng)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=sorted(SPACES))
def space(request):
    return SPACES[request.param]
