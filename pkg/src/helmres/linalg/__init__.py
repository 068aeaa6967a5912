from helmres.linalg.sparse import (
    SparseMatrix,
    load_matrix_market,
    load_vector_csv,
    save_matrix_market,
    save_vector_csv,
    spmv,
)
from helmres.linalg.factor import Factorization, ilu, lu_factor
from helmres.linalg.eig import (
    DenseEig,
    eig_dense,
    norm2_estimate,
    shift_invert_eigs,
    smallest_singular_value,
)

__all__ = [
    "DenseEig",
    "Factorization",
    "SparseMatrix",
    "eig_dense",
    "ilu",
    "load_matrix_market",
    "load_vector_csv",
    "lu_factor",
    "norm2_estimate",
    "save_matrix_market",
    "save_vector_csv",
    "shift_invert_eigs",
    "smallest_singular_value",
    "spmv",
]
