"""Closed-form modes, resonances, and quasimode wavenumber tables."""

from __future__ import annotations

import numpy as np

from helmres.fem.mesh import ScatterGeometry


def cavity_eigenvalue(n: int, m: int) -> float:
    """Dirichlet Laplacian eigenvalue pi^2 (n^2 + m^2) of the unit square."""
    return np.pi ** 2 * (n ** 2 + m ** 2)


def cavity_resonance(n: int, m: int) -> float:
    return float(np.sqrt(cavity_eigenvalue(n, m)))


def cavity_mode(n: int, m: int):
    """sin(n pi x) sin(m pi y)."""
    def u(x, y):
        return np.sin(n * np.pi * x) * np.sin(m * np.pi * y)
    return u


def cavity_modes_below(k: float) -> list[tuple[int, int]]:
    """Modes with resonance below k, strongest (largest n^2+m^2) first."""
    out = []
    nmax = int(np.ceil(k / np.pi)) + 1
    for n in range(1, nmax):
        for m in range(1, nmax):
            if cavity_eigenvalue(n, m) < k ** 2:
                out.append((n, m))
    out.sort(key=lambda nm: (-(nm[0] ** 2 + nm[1] ** 2), nm))
    return out


def cavity_source_solution(k: float, terms: int = 61):
    """Sine-series solution of the unit-source cavity problem.

    Only odd-odd modes are excited: coefficients 16 / (n m pi^2) against
    eigenvalue gaps pi^2(n^2+m^2) - k^2.
    """
    ns = np.arange(1, terms + 1, 2)
    coef = []
    for n in ns:
        for m in ns:
            c = 16.0 / (n * m * np.pi ** 2)
            gap = cavity_eigenvalue(int(n), int(m)) - k ** 2
            coef.append((int(n), int(m), c / gap))

    def u(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        acc = np.zeros(np.broadcast(x, y).shape)
        for n, m, c in coef:
            acc = acc + c * np.sin(n * np.pi * x) * np.sin(m * np.pi * y)
        return acc
    return u


def quasimode_k_neumann(n: int, m: int, L_O: float, l_O: float) -> float:
    """Closed-cavity wavenumber, one pressure-release end: mixed quarter-wave
    profile along the length, Neumann across the opening width."""
    return float(np.pi * np.sqrt((m + 0.5) ** 2 / L_O ** 2 + n ** 2 / l_O ** 2))


def quasimode_k_dirichlet(n: int, m: int, L_O: float, l_O: float) -> float:
    return float(np.pi * np.sqrt(m ** 2 / L_O ** 2 + n ** 2 / l_O ** 2))


def dirichlet_accumulation_k(n: int, l_O: float) -> float:
    """Accumulation wavenumbers pi n / l_O of the Dirichlet open cavity."""
    return float(np.pi * n / l_O)


def quasimode_table(geom: ScatterGeometry, k_max: float = 40.0,
                    n_max: int = 8, m_max: int = 8) -> list[dict]:
    """Sorted candidate quasimode wavenumbers for both wall cases."""
    rows = []
    for case, fn in (("neumann", quasimode_k_neumann),
                     ("dirichlet", quasimode_k_dirichlet)):
        for n in range(0 if case == "neumann" else 1, n_max + 1):
            for m in range(0, m_max + 1):
                if case == "dirichlet" and m == 0:
                    continue
                k = fn(n, m, geom.L_obstacle, geom.l_opening)
                if k <= k_max:
                    rows.append({"case": case, "n": n, "m": m, "k": k})
    rows.sort(key=lambda r: (r["k"], r["case"], r["n"], r["m"]))
    return rows


def scatter_cavity_mode(geom: ScatterGeometry, n: int, m: int,
                        dirichlet_edge: str = "opening"):
    """Closed-cavity eigenmode of the obstacle interior, extended by zero.

    The pressure-release (Dirichlet) edge sits either at the cavity
    opening (default, matching the physical quasimode) or at the closed
    end; the remaining sides are Neumann.
    """
    x0, x1, y0, y1 = geom.cavity_interior()
    L_O = x1 - x0
    l_O = y1 - y0
    open_at_low_x = geom.opening == "-x"
    dir_at_low_x = (dirichlet_edge == "opening") == open_at_low_x

    def u(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        inside = (x > x0) & (x < x1) & (y > y0) & (y < y1)
        if dir_at_low_x:
            ax = np.sin((m + 0.5) * np.pi * (x - x0) / L_O)
        else:
            ax = np.sin((m + 0.5) * np.pi * (x1 - x) / L_O)
        ay = np.cos(n * np.pi * (y - y0) / l_O)
        return np.where(inside, ax * ay, 0.0)
    return u
