import numpy as np
import pytest

from helmres import DimensionMismatch, HelmresError
from helmres.linalg import (SparseMatrix, load_matrix_market, load_vector_csv,
                            save_matrix_market, save_vector_csv, spmv)

from conftest import random_sparse


def test_spmv_identity():
    A = SparseMatrix.identity(3)
    x = np.array([1.0, 2.0, 3.0])
    assert np.array_equal(spmv(A, x), np.array([1, 2, 3], dtype=complex))


def test_spmv_permutation():
    A = SparseMatrix.from_dense([[0, 1], [1, 0]])
    x = np.array([1j, 1.0])
    assert np.array_equal(spmv(A, x), np.array([1.0, 1j]))


def test_spmv_matches_dense_oracle(rng):
    A = random_sparse(rng, 50, density=0.3)
    x = rng.standard_normal(50) + 1j * rng.standard_normal(50)
    dense = A.to_dense() @ x
    scale = np.linalg.norm(A.to_dense()) * np.linalg.norm(x)
    assert np.max(np.abs(spmv(A, x) - dense)) <= 1e-13 * scale


def test_spmv_dimension_mismatch():
    A = SparseMatrix.identity(3)
    with pytest.raises(DimensionMismatch):
        spmv(A, np.ones(4))


def test_csr_invariants_and_validate(rng):
    A = random_sparse(rng, 20)
    A.validate()
    assert len(A.row_offsets) == A.nrows + 1
    assert A.row_offsets[-1] == A.nnz
    # strictly increasing columns per row
    for i in range(A.nrows):
        row = A.col_indices[A.row_offsets[i]:A.row_offsets[i + 1]]
        assert np.all(np.diff(row) > 0)


def test_validate_rejects_bad_offsets():
    bad = SparseMatrix(2, 2, np.array([0, 1]), np.array([0]),
                       np.array([1.0 + 0j]))
    with pytest.raises(HelmresError):
        bad.validate()


def test_compress_drops_stored_zeros():
    A = SparseMatrix.from_coo([0, 0, 1], [0, 1, 1], [1.0, 0.0, 2.0], (2, 2))
    C = A.compress()
    assert C.nnz == 2
    assert np.all(C.values != 0)
    C.validate()


def test_values_are_readonly(rng):
    A = random_sparse(rng, 5)
    with pytest.raises(ValueError):
        A.values[0] = 0.0


def test_add_sub_scale_roundtrip(rng):
    A = random_sparse(rng, 12)
    B = random_sparse(rng, 12)
    C = (A + B) - B.scale(1.0)
    assert np.allclose(C.to_dense(), A.to_dense(), atol=1e-14)
    S = A.add_scaled_identity(-2.5j)
    assert np.allclose(S.to_dense(), A.to_dense() - 2.5j * np.eye(12))


def test_matrix_market_roundtrip(tmp_path, rng):
    A = random_sparse(rng, 17, density=0.25)
    p = tmp_path / "a.mtx"
    save_matrix_market(p, A)
    B = load_matrix_market(p)
    assert np.allclose(A.to_dense(), B.to_dense(), atol=1e-14)


def test_vector_csv_roundtrip(tmp_path, rng):
    x = rng.standard_normal(9) + 1j * rng.standard_normal(9)
    p = tmp_path / "x.csv"
    save_vector_csv(p, x)
    y = load_vector_csv(p)
    assert np.array_equal(x, y)
