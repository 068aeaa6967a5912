"""Helmholtz finite elements, instrumented GMRES, and convergence diagnostics.

The package is organized around the pipeline of a resonance study:

- :mod:`helmres.linalg` -- complex sparse kernels (CSR matrices, LU/ILU,
  dense and shift-invert eigensolvers, smallest singular values),
- :mod:`helmres.fem` -- structured meshes, Lagrange elements of degree 1-3,
  and assembly of cavity and PML-truncated scattering systems,
- :mod:`helmres.krylov` -- GMRES (full and restarted) instrumented with
  residual histories and extended Hessenberg snapshots,
- :mod:`helmres.accel` -- deflation projectors and the complex-shifted
  mass preconditioner, separately and combined,
- :mod:`helmres.diagnostics` -- harmonic Ritz extraction, plateau
  detection, and the two residual-ratio bound evaluators,
- :mod:`helmres.bench` -- config-driven benchmark runner and CLI.
"""

from helmres.errors import (
    CapExceededError,
    ContourError,
    ConvergenceError,
    DeflationConditionError,
    DimensionMismatch,
    HelmresError,
    OracleDomainError,
    SingularMatrixError,
    ZeroPivotError,
)

__version__ = "0.1.0"

__all__ = [
    "CapExceededError",
    "ContourError",
    "ConvergenceError",
    "DeflationConditionError",
    "DimensionMismatch",
    "HelmresError",
    "OracleDomainError",
    "SingularMatrixError",
    "ZeroPivotError",
    "__version__",
]
