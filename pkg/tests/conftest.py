import numpy as np
import pytest

from phasekin import gaussian_density, gaussian_wigner, make_grid

SIGMA_COHERENT = 2**-0.5


@pytest.fixture(scope="session")
def grid64():
    return make_grid(64, 8.0)


@pytest.fixture(scope="session")
def grid128():
    return make_grid(128, 8.0)


@pytest.fixture(scope="session")
def rho_default(grid64):
    return gaussian_density(grid64, 0.0, 1.0)


@pytest.fixture(scope="session")
def wigner_default(grid64):
    # coherent preset for hbar = 1: sigma_r * sigma_p = 1/2
    return gaussian_wigner(grid64, grid64, 0.0, 0.0, SIGMA_COHERENT, SIGMA_COHERENT)


@pytest.fixture(scope="session")
def wigner128(grid128):
    return gaussian_wigner(grid128, grid128, 0.0, 0.0, SIGMA_COHERENT, SIGMA_COHERENT)


def gauss(x, mu, sigma):
    return np.exp(-((x - mu) ** 2) / (2 * sigma**2)) / (sigma * np.sqrt(2 * np.pi))
