import numpy as np
import pytest

from core.freqgrid import make_grid
from core.states import EprSpec, SinglePhotonAmplitude, epr_state, gaussian_packet


@pytest.fixture
def grid3():
    """Nodes {1, 2, 3}."""
    return make_grid(1, 3, 3)


@pytest.fixture
def grid64():
    return make_grid(0, 10, 64)


@pytest.fixture
def packet64(grid64):
    return gaussian_packet(grid64, 5.0, 0.8)


@pytest.fixture
def epr64(grid64):
    return epr_state(grid64, EprSpec(10.0))


@pytest.fixture
def wide_grid():
    """[0, 20] with Δω = 0.25, wide enough for a σ = 1 packet at 10."""
    return make_grid(0, 20, 81)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def random_packet(rng):
    """Normalized complex Gaussian-noise packet on a given grid."""
    def make(grid) -> SinglePhotonAmplitude:
        raw = rng.normal(size=grid.n_points) + 1j * rng.normal(size=grid.n_points)
        return SinglePhotonAmplitude(grid, raw).normalized()
    return make
