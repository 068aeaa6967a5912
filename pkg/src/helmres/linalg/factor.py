"""Exact and incomplete LU factorizations of complex sparse matrices.

Exact LU is delegated to SuperLU, which is the workhorse behind the
shift-invert eigensolver and the exact shifted-mass preconditioner mode.
ILU0 is implemented here directly (fixed pattern, no dropping) because its
deterministic sparsity pattern is part of the contract; ILUT delegates to
``scipy.sparse.linalg.spilu``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from numba import njit

from helmres.errors import HelmresError, SingularMatrixError, ZeroPivotError
from helmres.linalg.sparse import SparseMatrix


@njit(cache=True)
def _ilu0_kernel(n, indptr, indices, data, diag_pos, pivot_shift):
    """In-place ILU0 on the CSR pattern of A. Returns offending row or -1.

    After success, strictly-lower entries hold L (unit diagonal implied) and
    the diagonal plus upper entries hold U.
    """
    pos_of = np.full(n, -1, dtype=np.int64)
    for i in range(n):
        start, end = indptr[i], indptr[i + 1]
        for p in range(start, end):
            pos_of[indices[p]] = p
        for p in range(start, end):
            k = indices[p]
            if k >= i:
                break
            ukk = data[diag_pos[k]]
            lik = data[p] / ukk
            data[p] = lik
            for q in range(diag_pos[k] + 1, indptr[k + 1]):
                pos = pos_of[indices[q]]
                if pos >= 0:
                    data[pos] -= lik * data[q]
        dpos = diag_pos[i]
        if data[dpos] == 0:
            if pivot_shift != 0.0:
                data[dpos] = pivot_shift
            else:
                return i
        for p in range(start, end):
            pos_of[indices[p]] = -1
    return -1


@njit(cache=True)
def _ilu0_solve(n, indptr, indices, data, diag_pos, b):
    """Two triangular sweeps: x = U^{-1} L^{-1} b on the ILU0 factors."""
    x = np.empty(n, dtype=np.complex128)
    for i in range(n):
        s = b[i]
        for p in range(indptr[i], diag_pos[i]):
            s -= data[p] * x[indices[p]]
        x[i] = s
    for i in range(n - 1, -1, -1):
        s = x[i]
        for p in range(diag_pos[i] + 1, indptr[i + 1]):
            s -= data[p] * x[indices[p]]
        x[i] = s / data[diag_pos[i]]
    return x


def _diag_positions(A: SparseMatrix) -> np.ndarray:
    """Position of each diagonal entry in the CSR data array."""
    ro, ci = A.row_offsets, A.col_indices
    diag = np.full(A.nrows, -1, dtype=np.int64)
    for i in range(A.nrows):
        row = ci[ro[i]:ro[i + 1]]
        j = np.searchsorted(row, i)
        if j < len(row) and row[j] == i:
            diag[i] = ro[i] + j
    return diag


@dataclass
class Factorization:
    """Handle to an exact or incomplete LU factorization.

    ``kind`` is one of ``"lu"``, ``"ilu0"``, ``"ilut"``.  ``solve`` applies
    the (approximate) inverse; for incomplete kinds this is the
    two-triangular-sweep application, not an exact solve.
    """

    kind: str
    n: int
    _splu: object | None = None
    _pattern: tuple | None = None   # (indptr, indices, data, diag_pos) for ilu0
    params: dict | None = None

    def solve(self, b: np.ndarray) -> np.ndarray:
        b = np.asarray(b, dtype=np.complex128)
        if b.shape[0] != self.n:
            raise HelmresError("factorization solve: dimension mismatch")
        if self.kind in ("lu", "ilut"):
            return self._splu.solve(b)
        indptr, indices, data, diag_pos = self._pattern
        return _ilu0_solve(self.n, indptr, indices, data, diag_pos, b)

    def solve_adjoint(self, b: np.ndarray) -> np.ndarray:
        """Apply the adjoint inverse ``(LU)^{-H} b`` (exact LU only)."""
        if self.kind != "lu":
            raise HelmresError("adjoint solve is only supported for exact LU")
        return self._splu.solve(np.asarray(b, dtype=np.complex128), trans="H")

    def factors(self):
        """Return (L, U, perm_r, perm_c) where applicable."""
        if self.kind == "lu":
            f = self._splu
            return (SparseMatrix.from_scipy(f.L), SparseMatrix.from_scipy(f.U),
                    f.perm_r, f.perm_c)
        if self.kind == "ilut":
            f = self._splu
            return (SparseMatrix.from_scipy(f.L), SparseMatrix.from_scipy(f.U),
                    f.perm_r, f.perm_c)
        indptr, indices, data, diag_pos = self._pattern
        n = self.n
        L = sp.csr_matrix((n, n), dtype=np.complex128).tolil()
        U = sp.lil_matrix((n, n), dtype=np.complex128)
        for i in range(n):
            L[i, i] = 1.0
            for p in range(indptr[i], indptr[i + 1]):
                j = indices[p]
                if j < i:
                    L[i, j] = data[p]
                else:
                    U[i, j] = data[p]
        return (SparseMatrix.from_scipy(L.tocsr()),
                SparseMatrix.from_scipy(U.tocsr()),
                np.arange(n), np.arange(n))


def lu_factor(A: SparseMatrix) -> Factorization:
    """Exact sparse LU via SuperLU.

    Raises :class:`SingularMatrixError` when a zero pivot survives the
    permutation (structurally or numerically singular matrix).
    """
    if A.nrows != A.ncols:
        raise HelmresError("lu_factor needs a square matrix")
    try:
        f = spla.splu(A.to_scipy().tocsc())
    except RuntimeError as e:
        raise SingularMatrixError(str(e)) from e
    u_diag = f.U.diagonal()
    if np.any(u_diag == 0):
        raise SingularMatrixError("zero pivot after permutation")
    return Factorization(kind="lu", n=A.nrows, _splu=f)


def ilu(A: SparseMatrix, kind: Literal["ilu0", "ilut"] = "ilu0", *,
        tau: float = 1e-3, fill: float = 10.0,
        pivot_shift: complex = 0.0) -> Factorization:
    """Incomplete LU factorization.

    ``ilu0`` keeps exactly the sparsity pattern of A (the diagonal must be
    structurally present and numerically nonzero).  ``ilut`` applies
    threshold dropping with parameters ``tau`` and ``fill``.  A zero pivot
    raises :class:`ZeroPivotError` naming the row unless an explicit
    ``pivot_shift`` is requested.
    """
    if A.nrows != A.ncols:
        raise HelmresError("ilu needs a square matrix")
    if kind == "ilut":
        try:
            f = spla.spilu(A.to_scipy().tocsc(), drop_tol=tau, fill_factor=fill)
        except RuntimeError as e:
            raise SingularMatrixError(str(e)) from e
        return Factorization(kind="ilut", n=A.nrows, _splu=f,
                             params={"tau": tau, "fill": fill})
    if kind != "ilu0":
        raise HelmresError(f"unknown ilu kind: {kind!r}")
    diag_pos = _diag_positions(A)
    missing = np.where(diag_pos < 0)[0]
    if len(missing):
        raise ZeroPivotError(int(missing[0]),
                             f"row {int(missing[0])} has no stored diagonal")
    data = A.values.copy()
    bad = _ilu0_kernel(A.nrows, A.row_offsets, A.col_indices, data, diag_pos,
                       complex(pivot_shift))
    if bad >= 0:
        raise ZeroPivotError(int(bad))
    return Factorization(kind="ilu0", n=A.nrows,
                         _pattern=(A.row_offsets, A.col_indices, data, diag_pos),
                         params={"pivot_shift": pivot_shift})
