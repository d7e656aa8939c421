import math

import numpy as np
import pytest

from qwalk import GridGeometry, WalkState
from qwalk.validate import random_state


@pytest.fixture
def rng():
    return np.random.default_rng(20240613)


@pytest.fixture
def g16():
    return GridGeometry(4)


def bell_state(geometry, c0=0, p0=(0, 0), c1=1, p1=(1, 0)):
    """(|0,c0,p0> + |1,c1,p1>) / sqrt(2)."""
    amps = np.zeros(geometry.dim, dtype=complex)
    amps[geometry.index(0, c0, *p0)] = 1 / math.sqrt(2)
    amps[geometry.index(1, c1, *p1)] = 1 / math.sqrt(2)
    return WalkState(geometry, amps)


__all__ = ["bell_state", "random_state"]
