import numpy as np
import pytest

from etamu_outage import fading, moments


@pytest.fixture(scope="session")
def fig1_interferer():
    return fading.make_params(0.3, 2.0, 1.0)


@pytest.fixture(scope="session")
def fig1_scenario(fig1_interferer):
    """N_R=3 scenario with four unequal-power interferers."""
    user = fading.make_params(0.1, 2.0, 1.0)
    energies = tuple(10.0 ** (e / 10.0) for e in (-1.0, -3.0, -5.0, -7.0))
    return moments.Scenario(3, user, fig1_interferer, energies)


@pytest.fixture(scope="session")
def small_scenario(fig1_interferer):
    """Two-interferer variant used for the cheaper consistency checks."""
    user = fading.make_params(0.1, 2.0, 1.0)
    return moments.Scenario(3, user, fig1_interferer, (10.0 ** -0.1, 10.0 ** -0.3))


def db(x):
    return 10.0 ** (x / 10.0)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240917)
