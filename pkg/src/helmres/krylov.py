"""Instrumented GMRES: full and restarted, with right-side operator hooks.

The solver records what the convergence diagnostics need: the residual
norm at every iteration, extended Hessenberg snapshots on a configurable
cadence, restart marks, and (opt-in) the orthonormal basis at snapshots.
Orthogonalization is modified Gram-Schmidt with one conditional
reorthogonalization pass; the least-squares problem is updated by Givens
rotations so the residual norm is available at no extra cost.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from helmres.errors import DimensionMismatch, HelmresError
from helmres.linalg.sparse import SparseMatrix


@dataclass
class LinearOperator:
    """Square operator defined by its action; linear to round-off."""

    n: int
    apply: Callable[[np.ndarray], np.ndarray]
    description: str = ""

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.apply(x)


def as_operator(A) -> LinearOperator:
    if isinstance(A, LinearOperator):
        return A
    if isinstance(A, SparseMatrix):
        return LinearOperator(A.nrows, A.matvec, "sparse matrix")
    a = np.asarray(A)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch("operator must be square")
    return LinearOperator(a.shape[0], lambda x: a @ x, "dense matrix")


@dataclass
class Snapshot:
    """Extended Hessenberg state at a global iteration.

    ``hessenberg`` is the raw (l+1) x l matrix of the current cycle,
    ``cycle_start`` the global iteration at which the cycle began, and
    ``basis`` the (n, l+1) Arnoldi block when basis recording is on.
    """

    iteration: int
    cycle_start: int
    hessenberg: np.ndarray
    basis: np.ndarray | None = None

    @property
    def size(self) -> int:
        return self.hessenberg.shape[1]


@dataclass
class GmresTrace:
    residual_norms: list[float] = field(default_factory=list)
    snapshots: dict[int, Snapshot] = field(default_factory=dict)
    restart_marks: list[int] = field(default_factory=list)
    converged: bool = False
    breakdown: bool = False
    iterations: int = 0
    b_norm: float = 0.0
    true_relres: float | None = None

    @property
    def relative_residuals(self) -> np.ndarray:
        r = np.asarray(self.residual_norms)
        return r / r[0] if r[0] != 0 else r

    def snapshot_iterations(self) -> list[int]:
        return sorted(self.snapshots)


@dataclass
class GmresOptions:
    tol: float = 1e-6
    max_iter: int = 2000
    restart: int | None = None
    x0: np.ndarray | None = None
    record: str = "snapshots"       # "norms" | "snapshots" | "basis"
    snapshot_every: int = 10
    reorthogonalize: bool = True
    # when the solved system is a projected/preconditioned stand-in, the
    # tolerance should reference the original right-hand side norm
    tol_reference: float | None = None


def _givens(a: complex, b: float):
    """Rotation zeroing b against a; returns (c, s, r) with c real."""
    if b == 0.0:
        return 1.0, 0.0 + 0.0j, a
    if a == 0:
        return 0.0, 1.0 + 0.0j, complex(b)
    t = np.hypot(abs(a), abs(b))
    c = abs(a) / t
    phase = a / abs(a)
    s = phase * np.conj(b) / t
    return c, s, phase * t


def gmres(op, b: np.ndarray, opts: GmresOptions | None = None,
          **kwargs) -> tuple[np.ndarray, GmresTrace]:
    """Right-preconditionable GMRES with full instrumentation.

    The iteration stops at the first iterate whose Givens-recurrence
    residual meets ``tol`` relative to the initial residual; the true
    residual of the returned iterate is recomputed once at the end and
    stored on the trace.  Reaching ``max_iter`` sets ``converged=False``
    without raising.  A vanishing continuation vector is the lucky
    breakdown: the Krylov space already contains the solution.
    """
    op = as_operator(op)
    if opts is None:
        opts = GmresOptions(**kwargs)
    elif kwargs:
        raise HelmresError("pass either an options object or keywords")
    b = np.asarray(b, dtype=np.complex128)
    if b.shape[0] != op.n:
        raise DimensionMismatch("gmres: rhs length does not match operator")
    n = op.n
    trace = GmresTrace()

    x = (np.zeros(n, dtype=np.complex128) if opts.x0 is None
         else np.asarray(opts.x0, dtype=np.complex128).copy())
    r = b - op(x) if opts.x0 is not None else b.copy()
    beta0 = float(np.linalg.norm(r))
    trace.b_norm = beta0
    trace.residual_norms.append(beta0)
    if beta0 == 0.0:
        trace.converged = True
        trace.true_relres = 0.0
        return x, trace
    target = opts.tol * (opts.tol_reference if opts.tol_reference
                         else beta0)

    global_iter = 0
    record_snapshots = opts.record in ("snapshots", "basis")
    record_basis = opts.record == "basis"
    done = False

    while not done:
        m = opts.restart or (opts.max_iter - global_iter)
        m = min(m, opts.max_iter - global_iter)
        if m <= 0:
            break
        beta = float(np.linalg.norm(r))
        U = np.empty((n, m + 1), dtype=np.complex128, order="F")
        U[:, 0] = r / beta
        H = np.zeros((m + 1, m), dtype=np.complex128)       # raw
        R = np.zeros((m + 1, m), dtype=np.complex128)       # rotated
        cs = np.zeros(m)
        sn = np.zeros(m, dtype=np.complex128)
        g = np.zeros(m + 1, dtype=np.complex128)
        g[0] = beta
        cycle_start = global_iter
        j = 0
        cycle_len = 0
        while j < m:
            w = op(U[:, j])
            norm0 = np.linalg.norm(w)
            for i in range(j + 1):
                hij = np.vdot(U[:, i], w)
                H[i, j] = hij
                w -= hij * U[:, i]
            norm1 = np.linalg.norm(w)
            if opts.reorthogonalize and norm1 < norm0 / np.sqrt(2.0):
                for i in range(j + 1):
                    c = np.vdot(U[:, i], w)
                    H[i, j] += c
                    w -= c * U[:, i]
                norm1 = np.linalg.norm(w)
            hlast = float(norm1)
            H[j + 1, j] = hlast

            R[:j + 2, j] = H[:j + 2, j]
            for i in range(j):
                t1 = cs[i] * R[i, j] + sn[i] * R[i + 1, j]
                t2 = -np.conj(sn[i]) * R[i, j] + cs[i] * R[i + 1, j]
                R[i, j], R[i + 1, j] = t1, t2
            c, s, rr = _givens(R[j, j], hlast)
            cs[j], sn[j] = c, s
            R[j, j], R[j + 1, j] = rr, 0.0
            g[j + 1] = -np.conj(s) * g[j]
            g[j] = c * g[j]

            global_iter += 1
            cycle_len = j + 1
            abs_res = float(abs(g[j + 1]))
            trace.residual_norms.append(abs_res)
            # the continuation vector also completes U_{l+1} for snapshots;
            # at an exact breakdown it is unusable and left zero
            U[:, j + 1] = w / hlast if hlast > 0.0 else 0.0

            breakdown = hlast <= 1e-14 * beta0
            converged = abs_res <= target
            at_cadence = (global_iter % opts.snapshot_every == 0)
            if record_snapshots and (at_cadence or converged or breakdown
                                     or j == m - 1
                                     or global_iter == opts.max_iter):
                snap = Snapshot(
                    iteration=global_iter, cycle_start=cycle_start,
                    hessenberg=H[:j + 2, :j + 1].copy(),
                    basis=U[:, :j + 2].copy() if record_basis else None)
                trace.snapshots[global_iter] = snap
            if breakdown:
                trace.breakdown = True
                trace.converged = True
                done = True
                break
            if converged:
                trace.converged = True
                done = True
                break
            if global_iter >= opts.max_iter:
                done = True
                break
            j += 1

        # solve the small triangular system and update the iterate
        y = np.zeros(cycle_len, dtype=np.complex128)
        for i in range(cycle_len - 1, -1, -1):
            y[i] = (g[i] - R[i, i + 1:cycle_len] @ y[i + 1:cycle_len]) / R[i, i]
        x = x + U[:, :cycle_len] @ y

        if not done:
            trace.restart_marks.append(global_iter)
            r = b - op(x)
            trace.residual_norms[-1] = float(np.linalg.norm(r))

    trace.iterations = global_iter
    trace.true_relres = float(np.linalg.norm(b - op(x)) / beta0)
    return x, trace


def solve_lsq_at(snapshot: Snapshot, beta: float) -> np.ndarray:
    """Least-squares coefficients min ||beta e1 - Hbar y|| for a snapshot."""
    l = snapshot.size
    rhs = np.zeros(l + 1, dtype=np.complex128)
    rhs[0] = beta
    y, *_ = np.linalg.lstsq(snapshot.hessenberg, rhs, rcond=None)
    return y


def export_hessenberg_snapshots(trace: GmresTrace, out_dir,
                                prefix: str = "hess") -> list:
    """Write every recorded extended Hessenberg block in Matrix Market."""
    import scipy.io
    from pathlib import Path

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for it in trace.snapshot_iterations():
        path = out / f"{prefix}_{it:05d}.mtx"
        scipy.io.mmwrite(str(path), trace.snapshots[it].hessenberg,
                         field="complex")
        written.append(path)
    return written


def true_residual(A, recover: Callable[[np.ndarray], np.ndarray],
                  x_inner: np.ndarray, b: np.ndarray) -> float:
    """Relative residual of the recovered iterate against the original system.

    ``recover`` maps the inner (deflated / preconditioned) unknown back to
    the physical solution; identity for a plain solve.
    """
    A = as_operator(A)
    u = recover(np.asarray(x_inner, dtype=np.complex128))
    nb = np.linalg.norm(b)
    if nb == 0:
        return float(np.linalg.norm(A(u)))
    return float(np.linalg.norm(b - A(u)) / nb)
