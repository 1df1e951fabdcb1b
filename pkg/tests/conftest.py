import numpy as np
import pytest

from widescan.measurement import build_reduction, compose_sensing


def sparse_signal(n, k, rng):
    """k-sparse complex vector with unit-power circular Gaussian amplitudes."""
    x = np.zeros(n, dtype=complex)
    support = rng.choice(n, size=k, replace=False)
    x[support] = (rng.standard_normal(k) + 1j * rng.standard_normal(k)) / np.sqrt(2)
    return x, np.sort(support)


def gaussian_sensing(m, n, seed):
    return compose_sensing(build_reduction("gaussian", m, n, seed=seed))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
