"""Complex compressed-row sparse matrices and their interchange formats.

The :class:`SparseMatrix` type is the single matrix currency of the
package: assembly produces it, solvers consume it, and the benchmark CLI
round-trips it through Matrix Market files.  Instances are immutable after
construction (the backing arrays are marked read-only) and therefore safe
to share across threads.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse as sp

from helmres.errors import DimensionMismatch, HelmresError


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass
class SparseMatrix:
    """Complex CSR matrix.

    Invariants (checked by :meth:`validate`):

    - ``row_offsets`` has ``nrows + 1`` nondecreasing entries, the last one
      equal to ``len(values)``;
    - column indices are strictly increasing within each row and < ``ncols``;
    - after :meth:`compress`, no stored value is exactly zero.
    """

    nrows: int
    ncols: int
    row_offsets: np.ndarray
    col_indices: np.ndarray
    values: np.ndarray
    _csr: sp.csr_matrix | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.row_offsets = _readonly(np.asarray(self.row_offsets, dtype=np.int64))
        self.col_indices = _readonly(np.asarray(self.col_indices, dtype=np.int64))
        self.values = _readonly(np.asarray(self.values, dtype=np.complex128))

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_scipy(cls, m) -> "SparseMatrix":
        m = sp.csr_matrix(m)
        m.sort_indices()
        return cls(m.shape[0], m.shape[1], m.indptr, m.indices,
                   m.data.astype(np.complex128))

    @classmethod
    def from_dense(cls, a) -> "SparseMatrix":
        return cls.from_scipy(sp.csr_matrix(np.asarray(a, dtype=np.complex128)))

    @classmethod
    def from_coo(cls, rows, cols, vals, shape) -> "SparseMatrix":
        """Build from triplets; duplicate entries are summed."""
        m = sp.coo_matrix((vals, (rows, cols)), shape=shape, dtype=np.complex128)
        return cls.from_scipy(m.tocsr())

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls.from_scipy(sp.identity(n, dtype=np.complex128, format="csr"))

    @classmethod
    def diagonal(cls, d) -> "SparseMatrix":
        return cls.from_scipy(sp.diags(np.asarray(d, dtype=np.complex128)).tocsr())

    # -- views -------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def nnz(self) -> int:
        return len(self.values)

    def to_scipy(self) -> sp.csr_matrix:
        if self._csr is None:
            self._csr = sp.csr_matrix(
                (self.values, self.col_indices, self.row_offsets),
                shape=self.shape)
        return self._csr

    def to_dense(self) -> np.ndarray:
        return self.to_scipy().toarray()

    def diagonal_values(self) -> np.ndarray:
        return self.to_scipy().diagonal()

    # -- algebra -----------------------------------------------------------

    def matvec(self, x: np.ndarray) -> np.ndarray:
        """Sparse matrix-vector product with row-sequential accumulation."""
        x = np.asarray(x)
        if x.shape[0] != self.ncols:
            raise DimensionMismatch(
                f"matvec: matrix is {self.nrows}x{self.ncols}, vector has "
                f"length {x.shape[0]}")
        return self.to_scipy().dot(x.astype(np.complex128, copy=False))

    def rmatvec(self, x: np.ndarray) -> np.ndarray:
        """Adjoint product ``A^H x``."""
        x = np.asarray(x)
        if x.shape[0] != self.nrows:
            raise DimensionMismatch("rmatvec: dimension mismatch")
        return self.to_scipy().conj().T.dot(x.astype(np.complex128, copy=False))

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        return SparseMatrix.from_scipy(self.to_scipy() + other.to_scipy())

    def __sub__(self, other: "SparseMatrix") -> "SparseMatrix":
        return SparseMatrix.from_scipy(self.to_scipy() - other.to_scipy())

    def scale(self, alpha: complex) -> "SparseMatrix":
        return SparseMatrix(self.nrows, self.ncols, self.row_offsets,
                            self.col_indices, self.values * alpha)

    def add_scaled_identity(self, alpha: complex) -> "SparseMatrix":
        """Return ``A + alpha*I``."""
        if self.nrows != self.ncols:
            raise DimensionMismatch("add_scaled_identity needs a square matrix")
        eye = sp.identity(self.nrows, dtype=np.complex128, format="csr")
        return SparseMatrix.from_scipy(self.to_scipy() + alpha * eye)

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix.from_scipy(self.to_scipy().T.tocsr())

    def conjugate_transpose(self) -> "SparseMatrix":
        return SparseMatrix.from_scipy(self.to_scipy().conj().T.tocsr())

    def compress(self, tol: float = 0.0) -> "SparseMatrix":
        """Drop stored zeros (and entries with magnitude <= ``tol``)."""
        m = self.to_scipy().copy()
        if tol > 0.0:
            m.data[np.abs(m.data) <= tol] = 0.0
        m.eliminate_zeros()
        return SparseMatrix.from_scipy(m)

    # -- invariants ----------------------------------------------------------

    def validate(self) -> None:
        ro, ci = self.row_offsets, self.col_indices
        if len(ro) != self.nrows + 1:
            raise HelmresError("row_offsets must have nrows+1 entries")
        if ro[0] != 0 or ro[-1] != len(self.values):
            raise HelmresError("row_offsets endpoints are inconsistent")
        if np.any(np.diff(ro) < 0):
            raise HelmresError("row_offsets must be nondecreasing")
        if len(ci) and (ci.min() < 0 or ci.max() >= self.ncols):
            raise HelmresError("column index out of range")
        for i in range(self.nrows):
            row = ci[ro[i]:ro[i + 1]]
            if len(row) > 1 and np.any(np.diff(row) <= 0):
                raise HelmresError(f"columns not strictly increasing in row {i}")


def spmv(A: SparseMatrix, x: np.ndarray) -> np.ndarray:
    """Exact sparse product ``A x`` (deterministic accumulation per row)."""
    return A.matvec(x)


# -- external interchange ----------------------------------------------------

def save_matrix_market(path: str | Path, A: SparseMatrix) -> None:
    """Write in Matrix Market coordinate format (complex general)."""
    scipy.io.mmwrite(str(path), A.to_scipy(), field="complex")


def load_matrix_market(path: str | Path) -> SparseMatrix:
    return SparseMatrix.from_scipy(sp.csr_matrix(scipy.io.mmread(str(path))))


def save_vector_csv(path: str | Path, x: np.ndarray) -> None:
    """Write a complex vector as a two-column (re, im) CSV file."""
    x = np.asarray(x, dtype=np.complex128)
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["re", "im"])
        for v in x:
            w.writerow([repr(float(v.real)), repr(float(v.imag))])


def load_vector_csv(path: str | Path) -> np.ndarray:
    rows = []
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        if header and header[0] not in ("re", "Re"):
            # headerless file: first line is data
            rows.append(complex(float(header[0]), float(header[1])))
        for rec in reader:
            rows.append(complex(float(rec[0]), float(rec[1])))
    return np.array(rows, dtype=np.complex128)
