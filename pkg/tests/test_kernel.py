import numpy as np
import pytest

from quditgates.errors import NotHermitian, NotInvertible, ShapeMismatch
from quditgates.kernel import (
    dagger,
    equal_up_to_global_phase,
    hermitian_eig,
    is_diagonal,
    is_unitary,
    kron,
    matmul,
    mod_inv,
)


def random_hermitian(rng, d):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (g + g.conj().T) / 2


def test_mod_inv_small_cases():
    assert mod_inv(1, 7) == 1
    assert mod_inv(2, 7) == 4
    assert mod_inv(4, 9) == 7
    for m in (2, 3, 5, 7):
        for a in range(1, m):
            assert (a * mod_inv(a, m)) % m == 1


def test_mod_inv_rejects_non_units():
    with pytest.raises(NotInvertible):
        mod_inv(0, 5)
    with pytest.raises(NotInvertible):
        mod_inv(3, 9)


def test_matmul_shape_check():
    with pytest.raises(ShapeMismatch):
        matmul(np.eye(2), np.eye(3))


def test_dagger_and_kron():
    a = np.array([[1, 2j], [0, 1]], dtype=complex)
    assert np.array_equal(dagger(a), a.conj().T)
    b = np.diag([1.0, -1.0])
    assert kron(a, b).shape == (4, 4)
    assert np.allclose(kron(a, b), np.kron(a, b))


def test_is_diagonal_and_unitary():
    assert is_diagonal(np.diag([1.0, 2.0, 3.0]))
    assert not is_diagonal(np.array([[1.0, 1e-6], [0.0, 1.0]]))
    assert is_unitary(np.eye(3))
    assert not is_unitary(np.diag([1.0, 0.5]))


@pytest.mark.parametrize("d", [2, 3, 5, 7, 9, 16])
def test_hermitian_eig_against_numpy(d):
    """Jacobi eigensolver must agree with the LAPACK oracle."""
    rng = np.random.default_rng(100 + d)
    for _ in range(8):
        h = random_hermitian(rng, d)
        w, v = hermitian_eig(h)
        w_ref = np.linalg.eigvalsh(h)
        assert np.max(np.abs(w - w_ref)) < 1e-9
        # eigenvector residuals and orthonormality
        assert np.max(np.abs(h @ v - v * w)) < 1e-9
        assert np.max(np.abs(v.conj().T @ v - np.eye(d))) < 1e-10


def test_hermitian_eig_degenerate_spectrum():
    rng = np.random.default_rng(7)
    g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    q, _ = np.linalg.qr(g)
    h = q @ np.diag([1.0, 1.0, 1.0, 2.0]) @ q.conj().T
    w, v = hermitian_eig(h)
    assert np.allclose(sorted(w), [1, 1, 1, 2], atol=1e-10)
    assert np.max(np.abs(h @ v - v * w)) < 1e-9


def test_hermitian_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        hermitian_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_equal_up_to_global_phase():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    ok, c = equal_up_to_global_phase(np.exp(0.7j) * a, a)
    assert ok
    assert abs(c - np.exp(0.7j)) < 1e-9
    ok, _ = equal_up_to_global_phase(a + 0.1, a)
    assert not ok
