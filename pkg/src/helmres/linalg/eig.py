"""Dense and sparse eigensolvers, and smallest-singular-value probes.

The dense path returns full spectra with bi-normalized left/right
eigenvector pairs, which is what the spectrum-based residual bound needs.
Large problems go through ARPACK shift-invert for the handful of
eigenvalues near a target, and through LU-powered inverse iteration on
``A* A`` for resolvent norms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse.linalg as spla

from helmres.errors import (CapExceededError, ConvergenceError, HelmresError,
                            SingularMatrixError)
from helmres.linalg.factor import lu_factor
from helmres.linalg.sparse import SparseMatrix

DENSE_EIG_CAP = 4000
_SVD_DENSE_CAP = 200


@dataclass
class DenseEig:
    """Eigendecomposition with left/right pairs.

    ``values`` are sorted by modulus, ascending.  Columns of
    ``right_vectors`` have unit norm; columns of ``left_vectors`` are scaled
    so that ``left[:, i].conj() @ right[:, i] == 1``, hence
    ``kappa(i) = ||v_i|| * ||v_hat_i|| >= 1`` measures the conditioning of
    eigenvalue ``i``.  Partial decompositions (shift-invert) carry
    ``left_vectors=None`` and ``complete=False``.
    """

    values: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray | None = None
    complete: bool = True

    def __len__(self) -> int:
        return len(self.values)

    def kappa(self, i: int | None = None):
        if self.left_vectors is None:
            raise HelmresError("kappa needs left eigenvectors (dense path)")
        if i is None:
            return (np.linalg.norm(self.right_vectors, axis=0)
                    * np.linalg.norm(self.left_vectors, axis=0))
        return (np.linalg.norm(self.right_vectors[:, i])
                * np.linalg.norm(self.left_vectors[:, i]))


def _as_dense(A) -> np.ndarray:
    if isinstance(A, SparseMatrix):
        return A.to_dense()
    return np.asarray(A, dtype=np.complex128)


def eig_dense(A, cap: int = DENSE_EIG_CAP) -> DenseEig:
    """Full spectrum with bi-normalized left and right eigenvectors.

    Left vectors are computed as conjugated rows of the inverse of the right
    eigenvector matrix, which enforces the bi-orthonormality
    ``v_hat_i^* v_j = delta_ij`` directly.  Refuses matrices above ``cap``;
    use :func:`shift_invert_eigs` for those.
    """
    a = _as_dense(A)
    n = a.shape[0]
    if a.shape[0] != a.shape[1]:
        raise HelmresError("eig_dense needs a square matrix")
    if n > cap:
        raise CapExceededError(
            f"matrix size {n} exceeds the dense-eig cap {cap}; "
            "use shift_invert_eigs for the eigenvalues you need")
    w, v = sla.eig(a)
    order = np.argsort(np.abs(w), kind="stable")
    w, v = w[order], v[:, order]
    vinv = sla.inv(v)
    left = vinv.conj().T  # column i satisfies left[:,i]^* v[:,i] = 1
    return DenseEig(values=w, right_vectors=v, left_vectors=left)


def norm2_estimate(A, iters: int = 25) -> float:
    """Power-iteration estimate of the spectral norm."""
    if isinstance(A, SparseMatrix):
        n = A.ncols
        mv, rmv = A.matvec, A.rmatvec
    else:
        a = np.asarray(A)
        n = a.shape[1]
        mv = lambda x: a @ x
        rmv = lambda x: a.conj().T @ x
    x = np.ones(n, dtype=np.complex128) / np.sqrt(n)
    s = 0.0
    for _ in range(iters):
        y = mv(x)
        ny = np.linalg.norm(y)
        if ny == 0:
            return 0.0
        x = rmv(y / ny)
        s = np.linalg.norm(x)
        if s == 0:
            return 0.0
        x = x / s
    return float(np.sqrt(s * np.linalg.norm(mv(x))))


def smallest_singular_value(A, shift: complex = 0.0, *,
                            method: str = "auto", tol: float = 1e-7,
                            max_iter: int = 500) -> float:
    """Smallest singular value of ``A - shift*I``.

    Primary path is inverse iteration on ``(A - shift I)^*(A - shift I)``
    driven by an exact LU of the shifted matrix; small instances fall back
    to a dense SVD.  Exactly singular matrices return 0.0 (the singular
    flag).
    """
    if isinstance(A, SparseMatrix):
        M = A if shift == 0 else A.add_scaled_identity(-shift)
        n = M.nrows
        if M.nrows != M.ncols:
            raise HelmresError("smallest_singular_value needs a square matrix")
        if method == "svd" or (method == "auto" and n <= _SVD_DENSE_CAP):
            s = sla.svdvals(M.to_dense())
            return float(s[-1])
        try:
            f = lu_factor(M)
        except SingularMatrixError:
            return 0.0
        # inverse iteration on (M^* M): x <- M^{-1} M^{-H} x
        x = np.ones(n, dtype=np.complex128)
        x += 1e-3 * np.arange(n) / max(n - 1, 1)
        x /= np.linalg.norm(x)
        rho_old = 0.0
        for _ in range(max_iter):
            y = f.solve(f.solve_adjoint(x))
            rho = float(np.linalg.norm(y))
            if rho == 0.0:
                return 0.0
            x = y / rho
            if rho_old > 0 and abs(rho - rho_old) <= 0.5 * tol * rho:
                break
            rho_old = rho
        return float(1.0 / np.sqrt(rho))
    a = _as_dense(A)
    if shift != 0:
        a = a - shift * np.eye(a.shape[0])
    s = sla.svdvals(a)
    return float(s[-1])


def shift_invert_eigs(A: SparseMatrix, shift: complex, count: int, *,
                      tol: float = 1e-10, max_restarts: int = 400) -> DenseEig:
    """The ``count`` eigenvalues of A nearest ``shift`` with right vectors.

    ARPACK shift-invert with a deterministic start vector.  On
    non-convergence raises :class:`ConvergenceError` carrying the converged
    subset.  Falls back to the dense path for matrices too small for
    ARPACK's bracket constraints.
    """
    n = A.nrows
    if A.nrows != A.ncols:
        raise HelmresError("shift_invert_eigs needs a square matrix")
    if count >= n - 1:
        full = eig_dense(A, cap=max(DENSE_EIG_CAP, n))
        order = np.argsort(np.abs(full.values - shift), kind="stable")[:count]
        order = order[np.argsort(np.abs(full.values[order]), kind="stable")]
        return DenseEig(values=full.values[order],
                        right_vectors=full.right_vectors[:, order],
                        left_vectors=None, complete=False)
    v0 = np.ones(n, dtype=np.complex128) / np.sqrt(n)
    try:
        w, v = spla.eigs(A.to_scipy().tocsc(), k=count, sigma=complex(shift),
                         which="LM", v0=v0, tol=tol, maxiter=max_restarts * count)
    except spla.ArpackNoConvergence as e:
        raise ConvergenceError(
            f"shift-invert did not converge: got {len(e.eigenvalues)} of "
            f"{count} pairs", values=e.eigenvalues, vectors=e.eigenvectors,
        ) from e
    order = np.argsort(np.abs(w - shift), kind="stable")
    w, v = w[order], v[:, order]
    nrm = np.linalg.norm(v, axis=0)
    v = v / nrm
    return DenseEig(values=w, right_vectors=v, left_vectors=None,
                    complete=False)
