import numpy as np
import pytest
import scipy.linalg as sla

from helmres import CapExceededError
from helmres.linalg import (SparseMatrix, eig_dense, norm2_estimate,
                            shift_invert_eigs, smallest_singular_value)

from conftest import random_sparse


def test_eig_dense_diagonal():
    e = eig_dense(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(e.values, [1.0, 2.0, 3.0])
    assert np.allclose(e.kappa(), 1.0)


def test_eig_dense_near_defective_kappa():
    e = eig_dense(np.array([[1.0, 1.0], [0.0, 1.0001]]))
    assert np.all(e.kappa() >= 1.0)
    assert np.max(e.kappa()) > 1e3


def test_eig_dense_binormalization(rng):
    a = rng.standard_normal((12, 12)) + 1j * rng.standard_normal((12, 12))
    e = eig_dense(a)
    gram = e.left_vectors.conj().T @ e.right_vectors
    assert np.allclose(gram, np.eye(12), atol=1e-9)
    # eigen-residuals within contract
    nrm = np.linalg.norm(a, 2)
    for i in range(12):
        r = a @ e.right_vectors[:, i] - e.values[i] * e.right_vectors[:, i]
        assert np.linalg.norm(r) <= 1e-10 * nrm


def test_eig_dense_cap():
    with pytest.raises(CapExceededError):
        eig_dense(np.eye(10), cap=5)


def test_kappa_at_least_one(rng):
    for _ in range(5):
        a = rng.standard_normal((9, 9)) + 1j * rng.standard_normal((9, 9))
        e = eig_dense(a)
        assert np.all(e.kappa() >= 1.0 - 1e-12)


def test_smin_diagonal():
    A = SparseMatrix.diagonal([3.0, 1e-4])
    assert smallest_singular_value(A) == pytest.approx(1e-4, rel=1e-9)


def test_smin_unitary(rng):
    q, _ = np.linalg.qr(rng.standard_normal((8, 8))
                        + 1j * rng.standard_normal((8, 8)))
    A = SparseMatrix.from_dense(q)
    assert smallest_singular_value(A) == pytest.approx(1.0, rel=1e-8)


def test_smin_inverse_iteration_matches_svd(rng):
    a = rng.standard_normal((30, 30)) + 1j * rng.standard_normal((30, 30))
    A = SparseMatrix.from_dense(a)
    ref = sla.svdvals(a)[-1]
    got = smallest_singular_value(A, method="inverse")
    assert got == pytest.approx(ref, rel=1e-8)


def test_smin_shifted(rng):
    a = rng.standard_normal((20, 20)) + 1j * rng.standard_normal((20, 20))
    A = SparseMatrix.from_dense(a)
    z = 0.7 - 0.3j
    ref = sla.svdvals(a - z * np.eye(20))[-1]
    assert smallest_singular_value(A, shift=z, method="inverse") == \
        pytest.approx(ref, rel=1e-8)


def test_smin_singular_flag():
    A = SparseMatrix.from_dense([[1.0, 1.0], [1.0, 1.0]])
    assert smallest_singular_value(A, method="inverse") == 0.0


def test_smin_below_every_eigenvalue(rng):
    a = rng.standard_normal((15, 15)) + 1j * rng.standard_normal((15, 15))
    A = SparseMatrix.from_dense(a)
    smin = smallest_singular_value(A, method="inverse")
    e = eig_dense(a)
    assert np.all(smin <= np.abs(e.values) * (1 + 1e-10))


def test_shift_invert_diag_nearest_zero():
    A = SparseMatrix.diagonal([1.0, 2.0, 3.0, 4.0])
    e = shift_invert_eigs(A, 0.0, 2)
    assert np.allclose(sorted(e.values.real), [1.0, 2.0])


def test_shift_invert_diag_near_3_4():
    A = SparseMatrix.diagonal([1.0, 2.0, 3.0, 4.0])
    e = shift_invert_eigs(A, 3.4, 1)
    assert np.allclose(e.values, [3.0])


def test_shift_invert_residuals(rng):
    A = random_sparse(rng, 80, density=0.08, diag_boost=2.0)
    e = shift_invert_eigs(A, 0.0, 6)
    nrm = norm2_estimate(A)
    for i in range(len(e)):
        r = A.matvec(e.right_vectors[:, i]) - e.values[i] * e.right_vectors[:, i]
        assert np.linalg.norm(r) <= 1e-8 * nrm
