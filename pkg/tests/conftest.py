import numpy as np
import pytest

from tclplus.api.superop import BathState, SpaceDims


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def pauli():
    return {
        "x": np.array([[0, 1], [1, 0]], dtype=np.complex128),
        "y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
        "z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
        "i": np.eye(2, dtype=np.complex128),
    }


def random_hermitian(rng, n, scale=1.0):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * (a + a.conj().T) / 2


def random_complex(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_density(rng, n):
    a = random_complex(rng, (n, n))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def matrix_with_singular_values(rng, values, shape=None):
    """``U diag(values) V^dagger`` with Haar-like random unitaries."""
    n = len(values)
    rows, cols = shape or (n, n)
    u, _ = np.linalg.qr(random_complex(rng, (rows, rows)))
    v, _ = np.linalg.qr(random_complex(rng, (cols, cols)))
    d = np.zeros((rows, cols), dtype=np.complex128)
    d[np.arange(n), np.arange(n)] = values
    return u @ d @ v.conj().T


@pytest.fixture
def thermal_bath(rng):
    """Mixed Gibbs state on a qutrit bath, for a qubit system."""
    return BathState.thermal(random_hermitian(rng, 3), beta=1.0, d_sys=2)


@pytest.fixture
def pure_bath(rng):
    return BathState.pure(random_complex(rng, 3), d_sys=2)


@pytest.fixture
def dims_2x3():
    return SpaceDims(2, 3)
