"""Config-driven benchmark execution and artifact emission.

Every run writes machine-readable artifacts: a summary CSV with one row
per (k, method), per-solve residual traces, harmonic-Ritz trajectories,
bound reports, and Matrix Market exports.  Reruns with the same config
byte-reproduce every numeric field except wall times, which live in their
own column.
"""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from helmres.accel import (additive_setup, build_csl, build_deflation,
                           cavity_deflation_vectors, csl_setup, deflated_setup,
                           plain_setup, scatter_deflation_vectors, solve_setup)
from helmres.bench.config import RunConfig, parse_method
from helmres.diagnostics import (default_contour, find_plateaus, hr_trajectory,
                                 pseudospectrum_bound, spectrum_bound)
from helmres.errors import HelmresError
from helmres.fem import (CavityProblem, FeSpace, PmlProfile, ScatterProblem,
                         analytic, assemble, build_mesh_cavity,
                         build_mesh_scatter, l2_error, save_mesh_text)
from helmres.krylov import GmresOptions, gmres
from helmres.linalg import (SparseMatrix, eig_dense, save_matrix_market,
                            save_vector_csv, shift_invert_eigs)
from helmres.linalg.eig import DENSE_EIG_CAP


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


@dataclass
class BenchProblem:
    """Mesh and space built once; systems assembled per wavenumber."""

    cfg: RunConfig
    mesh: object
    space: FeSpace

    @classmethod
    def from_config(cls, cfg: RunConfig) -> "BenchProblem":
        if cfg.benchmark == "cavity":
            mesh = build_mesh_cavity(cfg.h, jitter=cfg.jitter)
            space = FeSpace(mesh, cfg.degree)
        else:
            mesh = build_mesh_scatter(cfg.geometry())
            space = FeSpace(mesh, cfg.degree,
                            obstacle_dirichlet=(cfg.obstacle == "dirichlet"))
        return cls(cfg=cfg, mesh=mesh, space=space)

    def system(self, k: float):
        cfg = self.cfg
        if cfg.benchmark == "cavity":
            return assemble(self.space, k, CavityProblem())
        pml = PmlProfile(L=cfg.L, L_pml=cfg.L_pml, k=k)
        prob = ScatterProblem(theta=cfg.theta, obstacle=cfg.obstacle, pml=pml)
        return assemble(self.space, k, prob)

    def deflation_matrix(self, sys, deflation):
        cfg = self.cfg
        if cfg.benchmark == "cavity":
            if deflation == "all-negative":
                modes = analytic.cavity_modes_below(sys.k)
            elif deflation == "near-k":
                raise HelmresError("near-k selection is a scattering mode")
            else:
                modes = deflation
            return cavity_deflation_vectors(self.space, modes)
        geom = cfg.geometry()
        if deflation == "near-k":
            modes = [(n, m) for n in range(0, 8) for m in range(0, 8)
                     if abs(analytic.quasimode_k_neumann(
                         n, m, geom.L_obstacle, geom.l_opening) - sys.k)
                     <= cfg.near_k_window]
            if not modes:
                raise HelmresError("no quasimode within the near-k window")
        elif deflation == "all-negative":
            raise HelmresError("all-negative selection is a cavity mode")
        else:
            modes = deflation
        return scatter_deflation_vectors(self.space, geom, modes,
                                         cfg.dirichlet_edge)

    def method_setup(self, sys, method: str):
        cfg = self.cfg
        csl_mode, deflation, additive = parse_method(method)
        pc = None
        if csl_mode is not None:
            pc = build_csl(sys, mode=csl_mode, tau=cfg.csl_tau,
                           fill=cfg.csl_fill)
        basis = None
        if deflation is not None:
            Z = self.deflation_matrix(sys, deflation)
            basis = build_deflation(sys.A, Z)
        if additive:
            setup = additive_setup(sys.A, sys.b, basis, pc)
        elif basis is not None:
            setup = deflated_setup(sys.A, sys.b, basis, pc)
        elif pc is not None:
            setup = csl_setup(sys.A, sys.b, pc)
        else:
            setup = plain_setup(sys.A, sys.b)
        setup.description = method
        return setup

    def gmres_options(self, record=None, snapshot_every=None) -> GmresOptions:
        cfg = self.cfg
        return GmresOptions(
            tol=cfg.tol, max_iter=cfg.max_iter,
            restart=cfg.restart or None,
            record=record if record is not None else cfg.record,
            snapshot_every=snapshot_every or cfg.snapshot_every)


def _trace_path(out: Path, k: float, method: str) -> Path:
    safe = method.replace("(", "_").replace(")", "").replace("+", "-") \
                 .replace(";", "_").replace(",", "_").replace(":", "-")
    return out / f"trace_{k:.6f}_{safe}.csv"


def write_trace_csv(path: Path, trace) -> None:
    restarts = set(trace.restart_marks)
    rel = trace.relative_residuals
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["iter", "relres", "restart_flag"])
        for i, r in enumerate(rel):
            w.writerow([i, _fmt(float(r)), 1 if i in restarts else 0])


def solve_one(problem: BenchProblem, sys, method: str, out: Path,
              record=None, snapshot_every=None):
    """Assembled system + method -> (row dict, solution, trace)."""
    t0 = time.perf_counter()
    setup = problem.method_setup(sys, method)
    opts = problem.gmres_options(record, snapshot_every)
    u, trace = solve_setup(setup, opts)
    wall = time.perf_counter() - t0
    tpath = _trace_path(out, sys.k, method)
    write_trace_csv(tpath, trace)
    rel = trace.residual_norms[-1] / trace.residual_norms[0]
    row = {
        "k": sys.k, "method": method, "iterations": trace.iterations,
        "converged": int(trace.converged), "relres": float(rel),
        "true_relres": float(trace.true_relres),
        "plateaus": len(find_plateaus(trace.residual_norms)),
        "trace_file": tpath.name, "wall_s": wall,
    }
    return row, u, trace


_SUMMARY_COLS = ["k", "method", "iterations", "converged", "relres",
                 "true_relres", "l2_error", "plateaus", "trace_file",
                 "wall_s"]


def write_summary(out: Path, rows: list[dict]) -> Path:
    path = out / "summary.csv"
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(_SUMMARY_COLS)
        for row in rows:
            w.writerow([_fmt(row.get(c, "")) for c in _SUMMARY_COLS])
    return path


def _cavity_reference(problem: BenchProblem, k: float):
    cfg = problem.cfg
    if cfg.benchmark != "cavity" or cfg.error_reference == "none":
        return None
    if cfg.error_reference == "series":
        return analytic.cavity_source_solution(k)
    if cfg.error_reference == "direct":
        from helmres.linalg.factor import lu_factor
        sys = problem.system(k)
        return lu_factor(sys.A).solve(sys.b)
    raise HelmresError(f"unknown error reference {cfg.error_reference!r}")


def run_single(cfg: RunConfig, k: float | None = None) -> dict:
    """One full-detail solve per configured method at a single wavenumber."""
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    problem = BenchProblem.from_config(cfg)
    k = float(k if k is not None else cfg.k)
    sys = problem.system(k)
    rows = []
    for method in cfg.methods:
        row, u, trace = solve_one(problem, sys, method, out)
        ref = _cavity_reference(problem, k)
        if ref is not None:
            row["l2_error"] = l2_error(problem.space, u, ref, mass=sys.M)
        rows.append(row)
    path = write_summary(out, rows)
    return {"summary": path, "rows": rows}


def _sweep_point(problem, cfg, out, k):
    sys = problem.system(k)
    ref = _cavity_reference(problem, k)
    rows = []
    for method in cfg.methods:
        row, u, _ = solve_one(problem, sys, method, out, record="norms")
        if ref is not None:
            row["l2_error"] = l2_error(problem.space, u, ref, mass=sys.M)
        rows.append(row)
    return rows


def run_sweep(cfg: RunConfig) -> dict:
    """Solve every configured method at every sweep wavenumber."""
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    problem = BenchProblem.from_config(cfg)
    ks = cfg.sweep_ks()
    all_rows = []
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            for rows in pool.map(
                    lambda k: _sweep_point(problem, cfg, out, k), ks):
                all_rows.extend(rows)
    else:
        for k in ks:
            all_rows.extend(_sweep_point(problem, cfg, out, k))
    all_rows.sort(key=lambda r: (r["k"], r["method"]))
    path = write_summary(out, all_rows)
    return {"summary": path, "rows": all_rows}


def write_hr_csv(path: Path, traj, eig_values) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["iter", "re", "im", "matched_eig_id", "dist"])
        for row_i, it in enumerate(traj.iterations):
            matched_ids = {}
            for t in range(len(traj.targets)):
                z = traj.matched[row_i, t]
                if not np.isnan(z.real):
                    matched_ids[complex(z)] = t
            for z in traj.ritz_values[row_i]:
                t = matched_ids.get(complex(z), -1)
                dist = traj.distances[row_i, t] if t >= 0 else ""
                w.writerow([int(it), _fmt(float(z.real)), _fmt(float(z.imag)),
                            t, _fmt(float(dist)) if dist != "" else ""])


def run_diagnose(cfg: RunConfig, k: float | None = None,
                 schedule: list | None = None) -> dict:
    """Bound reports and HR trajectories for one instrumented solve.

    Each schedule entry is (l, m, J) with J counting the smallest-modulus
    eigenvalues that the matched Ritz values cancel.  Any bound violation
    is a hard error.
    """
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    problem = BenchProblem.from_config(cfg)
    k = float(k if k is not None else cfg.k)
    schedule = schedule if schedule is not None else \
        [tuple(e) for e in cfg.bounds]
    sys = problem.system(k)
    method = cfg.methods[0]
    row, u, trace = solve_one(problem, sys, method, out,
                              record="snapshots",
                              snapshot_every=cfg.snapshot_every)

    n = sys.n
    if n <= DENSE_EIG_CAP:
        eig = eig_dense(sys.A.to_dense())
        values = eig.values
    else:
        eig = None
        part = shift_invert_eigs(sys.A, 0.0, min(cfg.n_eigs, n - 2))
        values = part.values

    order = np.argsort(np.abs(values), kind="stable")
    tracked = values[order][:min(len(values), cfg.n_eigs)]
    neg = tracked[tracked.real < 0] if np.any(tracked.real < 0) else tracked
    traj = hr_trajectory(trace, neg)
    hr_path = out / f"hr_{k:.6f}.csv"
    write_hr_csv(hr_path, traj, neg)
    eig_path = out / f"eigs_{k:.6f}.csv"
    with open(eig_path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["id", "re", "im"])
        for i, z in enumerate(neg):
            w.writerow([i, _fmt(float(z.real)), _fmt(float(z.imag))])

    reports = []
    contour_cache = {}
    for (l, m, J) in schedule:
        l, m, J = int(l), int(m), int(J)
        if l not in trace.snapshots:
            raise HelmresError(f"schedule entry l={l} has no snapshot "
                               f"(cadence {cfg.snapshot_every})")
        if eig is not None:
            rep = spectrum_bound(eig, trace, l, m,
                                 select_J=J if J > 0 else None)
            reports.append(rep)
            if not rep.valid:
                raise HelmresError(f"spectrum bound violated at (l={l}, m={m}, "
                                   f"J={J}): {rep.bound} < {rep.measured}")
            if J > 0:
                if J not in contour_cache:
                    sel = np.argsort(np.abs(eig.values), kind="stable")[:J]
                    mask = np.zeros(len(eig.values), dtype=bool)
                    mask[sel] = True
                    contour_cache[J] = default_contour(eig.values[~mask],
                                                       eig.values[mask])
                rep2 = pseudospectrum_bound(sys.A, eig.values,
                                            contour_cache[J], trace, l, m,
                                            select_J=J)
                reports.append(rep2)
                if not rep2.valid:
                    raise HelmresError(
                        f"pseudospectrum bound violated at (l={l}, m={m}, "
                        f"J={J}): {rep2.bound} < {rep2.measured}")
    bounds_path = out / f"bounds_{k:.6f}.json"
    with open(bounds_path, "w") as f:
        json.dump({"k": k, "method": method,
                   "reports": [r.as_dict() for r in reports]}, f, indent=1)
    return {"row": row, "hr": hr_path, "eigs": eig_path, "bounds": bounds_path,
            "reports": reports, "trajectory": traj, "trace": trace,
            "tracked": neg}


def export_matrix(cfg: RunConfig, k: float | None = None) -> dict:
    """Write the assembled system as Matrix Market + CSV + mesh text."""
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    problem = BenchProblem.from_config(cfg)
    k = float(k if k is not None else cfg.k)
    sys = problem.system(k)
    paths = {
        "A": out / f"A_{k:.6f}.mtx",
        "b": out / f"b_{k:.6f}.csv",
        "mesh": out / "mesh.txt",
    }
    save_matrix_market(paths["A"], sys.A)
    save_vector_csv(paths["b"], sys.b)
    save_mesh_text(paths["mesh"], problem.mesh)
    return paths


def quasimode_table_rows(cfg: RunConfig, k_max: float = 40.0) -> list[dict]:
    return analytic.quasimode_table(cfg.geometry(), k_max=k_max)
