import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


def random_state(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_grid(rng, dim1, dim2):
    a = rng.normal(size=(dim1, dim2)) + 1j * rng.normal(size=(dim1, dim2))
    return a / np.linalg.norm(a)


def random_unitary(rng, dim):
    h = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h = (h + h.conj().T) / 2
    _, v = np.linalg.eigh(h)
    return v
