"""Shared fixtures: pole-avoiding sample points and the reference loop."""

import numpy as np
import pytest

from holo.holonomy import Loop
from holo.manifold import DEFAULT_CONVENTION, GrassmannianPoint


def pole_avoiding_coords(n, seed, margin=0.1):
    """(n, 8) coordinates with every theta kept `margin` away from the
    tan/cot singularities at 0 and pi/2."""
    rng = np.random.default_rng(seed)
    thetas = rng.uniform(margin, np.pi / 2 - margin, size=(n, 4))
    phis = rng.uniform(0.0, 2.0 * np.pi, size=(n, 4))
    return np.hstack([thetas, phis])


@pytest.fixture(scope="session")
def conv():
    return DEFAULT_CONVENTION


@pytest.fixture(scope="session")
def reference_loop():
    """The rectangle theta24: 0 -> pi/4, phi24: 0 -> pi at the origin of the
    other six coordinates; its holonomies are diag(1, -i) and diag(1, +i)."""
    return Loop(
        base=GrassmannianPoint(),
        segments=(
            {"theta24": np.pi / 4},
            {"phi24": np.pi},
            {"theta24": -np.pi / 4},
            {"phi24": -np.pi},
        ),
        steps_per_segment=1000,
    )


@pytest.fixture(scope="session")
def generic_point():
    return GrassmannianPoint(
        theta13=0.9, theta14=0.8, theta23=0.7, theta24=0.6,
        phi13=0.3, phi14=0.2, phi23=0.5, phi24=0.4,
    )
