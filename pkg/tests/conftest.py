"""Shared fixtures and independent oracles used across the suite."""

import numpy as np
import pytest
import scipy.linalg

from sbparity import bath_from_modes, discretize_bath, SpectralLaw


def single_mode_bath(omega=1.0, lam=1.0):
    return bath_from_modes([(omega, lam)])


def bare_fock_ground_energy(omega, lam, delta, cap):
    """Oracle: full spin-boson diagonalization in the bare product basis.

    Assembles -delta/2 sigma_x + omega a+a + lam/2 (a+ + a) sigma_z over
    {|up, n>, |down, n>} with n <= cap and returns the lowest eigenvalue.
    Independent of the displaced-basis route: no parity decomposition, no
    displaced states, no L elements.
    """
    dim = cap + 1
    n = np.arange(dim)
    a = np.diag(np.sqrt(n[1:].astype(float)), 1)
    x = a + a.T
    hosc = np.diag(omega * n.astype(float))
    h = np.zeros((2 * dim, 2 * dim))
    h[:dim, :dim] = hosc + 0.5 * lam * x
    h[dim:, dim:] = hosc - 0.5 * lam * x
    h[:dim, dim:] = -0.5 * delta * np.eye(dim)
    h[dim:, :dim] = -0.5 * delta * np.eye(dim)
    return float(scipy.linalg.eigh(h, eigvals_only=True, subset_by_index=[0, 0])[0])


def random_bath(rng, n_modes, alpha_range=(0.01, 0.5), s_range=(0.3, 1.0)):
    alpha = float(rng.uniform(*alpha_range))
    s = float(rng.uniform(*s_range))
    return discretize_bath(SpectralLaw(alpha, s, 1.0), n_modes, 2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240801)
