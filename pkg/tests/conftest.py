import numpy as np
import pytest

SEED = 20240917


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


def random_density_matrix(rng, dim, zero_top=0):
    """Random full-rank density matrix; optionally empty in the top levels."""
    core = dim - zero_top
    g = rng.normal(size=(core, core)) + 1j * rng.normal(size=(core, core))
    mat = g @ g.conj().T
    mat /= mat.trace().real
    out = np.zeros((dim, dim), dtype=complex)
    out[:core, :core] = mat
    return out


def random_unitary(rng, dim):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))
