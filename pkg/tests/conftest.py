import math

import numpy as np
import pytest

from catshield.channel import LossyStage, lossy_channel
from catshield.core import CatState


def random_amplitude(rng, max_xi_sq=25.0):
    """(x0, p0) with |xi|^2 <= max_xi_sq, i.e. x0^2 + p0^2 <= 2*max_xi_sq."""
    r = math.sqrt(rng.uniform(0.05, 2.0 * max_xi_sq))
    theta = rng.uniform(0.0, 2.0 * math.pi)
    return r * math.cos(theta), r * math.sin(theta)


def random_state(rng, parity=None, max_xi_sq=25.0):
    x0, p0 = random_amplitude(rng, max_xi_sq)
    if parity is None:
        parity = "even" if rng.random() < 0.5 else "odd"
    return CatState(x0, p0, parity)


def random_stage(rng):
    return LossyStage(
        eta=rng.uniform(0.05, 1.0),
        gamma=rng.uniform(-1.0, 1.0),
        v=rng.uniform(0.5, 3.0),
        gamma_t=rng.uniform(-0.6, 0.6),
    )


def random_channel(rng):
    return lossy_channel(random_stage(rng))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
