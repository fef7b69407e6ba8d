import numpy as np
import pytest

from commonmodes.momentum_modes import MomentumGrid, ModeDistribution, make_discrete_modes, normalize

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def grid1d():
    return MomentumGrid.uniform(-10.0, 10.0, 512)


def random_distribution(rng, grid, support=None):
    """Normalized random complex amplitudes, optionally on a subset of points."""
    if support is None:
        amps = rng.normal(size=grid.size) + 1j * rng.normal(size=grid.size)
        return normalize(ModeDistribution(grid, amps))
    modes = [(int(k), complex(*rng.normal(size=2))) for k in support]
    return make_discrete_modes(grid, modes)


def random_modes(rng, grid, m):
    return random_distribution(rng, grid, rng.choice(grid.size, size=m, replace=False))
