import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from affine_vlab.numerics.fields import band_limited_field, bump  # noqa: E402
from affine_vlab.numerics.geometry import build_grid  # noqa: E402
from affine_vlab.numerics.quadrature import directions  # noqa: E402
from affine_vlab.schemas.domain import DomainSpec  # noqa: E402


@pytest.fixture(scope="session")
def disk_spec():
    return DomainSpec.ball_domain(2, 1.0)


@pytest.fixture(scope="session")
def disk_grid(disk_spec):
    return build_grid(disk_spec, 1.0 / 24)


@pytest.fixture(scope="session")
def square_grid():
    return build_grid(DomainSpec.unit_square(), 1.0 / 24)


@pytest.fixture(scope="session")
def ball_grid():
    return build_grid(DomainSpec.ball_domain(3, 1.0), 0.125)


@pytest.fixture(scope="session")
def ds2():
    return directions(2, 128)


@pytest.fixture(scope="session")
def ds3():
    return directions(3, 266)


@pytest.fixture(scope="session")
def disk_bump(disk_grid):
    return bump(disk_grid, radius=1.0)


@pytest.fixture
def random_field(disk_grid):
    def make(seed: int = 0, positive: bool = False):
        return band_limited_field(disk_grid, np.random.default_rng(seed), positive=positive)
    return make
