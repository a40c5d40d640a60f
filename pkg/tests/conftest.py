import math

import numpy as np
import pytest

from hangersim import CavityParams, get_preset


@pytest.fixture(scope="session")
def q2():
    return get_preset("Q2")


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)


def random_cavity(rng, chi_floor=1e-2):
    """A physically sensible random cavity: GHz-scale resonance, kHz-MHz rates.

    chi is kept at least ``chi_floor`` of kappa so differenced pointer
    distances stay clear of cancellation noise.
    """
    omega_r = 2.0 * math.pi * rng.uniform(4e9, 9e9)
    kappa_c = 10.0 ** rng.uniform(5.0, 7.5)
    kappa_i = 10.0 ** rng.uniform(4.0, 7.5)
    kappa = kappa_c + kappa_i
    chi = rng.choice([-1.0, 1.0]) * kappa * 10.0 ** rng.uniform(math.log10(chi_floor), 0.5)
    return CavityParams(omega_r=omega_r, kappa_c=kappa_c, kappa_i=kappa_i, chi=chi)
