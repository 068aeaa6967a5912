import numpy as np
import pytest
import scipy.linalg as sla
import scipy.optimize

from helmres import HelmresError, OracleDomainError
from helmres.diagnostics import (deflation_ratio, find_plateaus, harmonic_ritz,
                                 hr_trajectory, match_ritz_to_eigenvalues,
                                 minimax_poly, minimizing_polynomial_roots,
                                 s_ratio)
from helmres.krylov import GmresOptions, gmres
from helmres.linalg import SparseMatrix, smallest_singular_value

from conftest import random_sparse


def run_with_snapshots(A, b, l_max, every=1):
    return gmres(A, b, GmresOptions(tol=1e-14, max_iter=l_max,
                                    record="snapshots", snapshot_every=every))


def test_hr_one_step_least_squares_oracle():
    # minimize ||(I - A/nu) r0|| for A = diag(1,2), r0 = (1,1)/sqrt(2):
    # c* = -<Ar0, r0>/||Ar0||^2 = -3/5, root = 5/3
    A = SparseMatrix.diagonal([1.0, 2.0])
    b = np.array([1.0, 1.0]) / np.sqrt(2.0)
    _, tr = run_with_snapshots(A, b, 1)
    nu = harmonic_ritz(tr.snapshots[1].hessenberg)
    assert nu[0] == pytest.approx(5.0 / 3.0, rel=1e-12)


def test_hr_full_spectrum_at_lucky_breakdown(rng):
    a = rng.standard_normal((6, 6)) + 2 * np.eye(6)
    A = SparseMatrix.from_dense(a)
    b = rng.standard_normal(6)
    _, tr = run_with_snapshots(A, b, 6)
    last = max(tr.snapshots)
    nu = harmonic_ritz(tr.snapshots[last].hessenberg)
    lam = np.sort_complex(np.linalg.eigvals(a))
    assert np.allclose(np.sort_complex(nu), lam, atol=1e-8 * np.abs(lam).max())


def test_hr_count_and_nonzero(rng):
    A = random_sparse(rng, 20, density=0.4, diag_boost=2.0)
    b = rng.standard_normal(20) + 0j
    _, tr = run_with_snapshots(A, b, 8)
    for it in tr.snapshot_iterations():
        nu = harmonic_ritz(tr.snapshots[it].hessenberg)
        assert len(nu) == tr.snapshots[it].size
        assert np.all(np.abs(nu) > 0)


def test_hr_matches_polynomial_oracle(rng):
    for _ in range(5):
        a = rng.standard_normal((20, 20)) + 1j * rng.standard_normal((20, 20))
        a += 3 * np.eye(20)
        A = SparseMatrix.from_dense(a)
        b = rng.standard_normal(20) + 0j
        _, tr = run_with_snapshots(A, b, 8)
        for l in (4, 8):
            nu = harmonic_ritz(tr.snapshots[l].hessenberg)
            roots = minimizing_polynomial_roots(A, b, l)
            assert np.allclose(np.sort_complex(nu), np.sort_complex(roots),
                               atol=1e-8 * np.abs(roots).max())


def test_polynomial_oracle_trivials():
    A = SparseMatrix.identity(4)
    b = np.ones(4)
    roots = minimizing_polynomial_roots(A, b, 1)
    assert roots[0] == pytest.approx(1.0, rel=1e-12)
    A2 = SparseMatrix.diagonal([1.0, 2.0])
    r2 = minimizing_polynomial_roots(A2, np.array([0.7, 0.9]), 2)
    assert np.allclose(np.sort(r2.real), [1.0, 2.0], atol=1e-10)


def test_polynomial_oracle_refuses_outside_domain(rng):
    A = random_sparse(rng, 30, density=0.3, diag_boost=2.0)
    with pytest.raises(OracleDomainError):
        minimizing_polynomial_roots(A, rng.standard_normal(30), 16)


def test_hr_lower_bound_from_smallest_singular_value(rng):
    # |nu| >= s_min(A) at every snapshot
    A = random_sparse(rng, 25, density=0.4, diag_boost=1.0)
    smin = smallest_singular_value(A, method="inverse")
    b = rng.standard_normal(25) + 0j
    _, tr = run_with_snapshots(A, b, 12)
    for it in tr.snapshot_iterations():
        nu = harmonic_ritz(tr.snapshots[it].hessenberg)
        assert np.min(np.abs(nu)) >= smin * (1 - 1e-8)


def test_s_ratio_identity_when_matched():
    lam = np.array([1.0, 2.0, 3.0])
    pts = np.array([0.5, 4.0, 10.0])
    assert s_ratio(lam, lam, pts) == pytest.approx(1.0, rel=1e-14)


def test_s_ratio_arithmetic():
    val = s_ratio(np.array([-0.001]), np.array([-0.1]), np.array([1.0]))
    assert val == pytest.approx(1001.0 / 11.0, rel=1e-12)


def test_s_ratio_pole_guard():
    with pytest.raises(HelmresError):
        deflation_ratio(np.array([-0.1]), np.array([-0.001]),
                        np.array([-0.1]))


def test_minimax_trivials():
    v, cert = minimax_poly(np.array([1.0]), 1)
    assert v == 0.0 and cert
    v, cert = minimax_poly(np.array([1.0, -1.0]), 1)
    assert v == pytest.approx(1.0, abs=1e-9)


def test_minimax_upper_estimate_against_grid_oracle():
    pts = np.arange(1.0, 6.0)
    got, _ = minimax_poly(pts, 3)

    def objective(roots):
        q = np.prod(1.0 - pts[None, :] / roots[:, None], axis=0)
        return np.max(np.abs(q))
    best = np.inf
    grid = np.linspace(1.0, 5.0, 21)
    starts = [[1.5, 3.0, 4.5], [3 - np.sqrt(3), 3.0, 3 + np.sqrt(3)]]
    for r1 in grid:
        for r2 in grid:
            for r3 in grid:
                val = objective(np.array([r1, r2, r3]))
                if val < best:
                    best = val
                    starts.append([r1, r2, r3])
    for x0 in starts[-3:] + starts[:2]:
        res = scipy.optimize.minimize(
            lambda r: objective(np.asarray(r)), x0=x0,
            method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-14,
                                           "maxiter": 5000})
        best = min(best, res.fun)
    assert got == pytest.approx(best, abs=1e-3)
    assert got >= best - 1e-6      # upper estimate stays an upper bound


def test_minimax_annihilation():
    v, cert = minimax_poly(np.array([1.0, 2.0]), 5)
    assert v == 0.0 and cert


def test_match_ritz_injective():
    ritz = np.array([1.05, 2.2, 0.5])
    targets = np.array([1.0, 2.0])
    matched, dist = match_ritz_to_eigenvalues(ritz, targets)
    assert matched[0] == 1.05
    assert matched[1] == 2.2
    assert dist[0] == pytest.approx(0.05)
    # two targets cannot share one Ritz value
    targets2 = np.array([1.0, 1.1])
    m2, d2 = match_ritz_to_eigenvalues(np.array([1.05]), targets2)
    assert np.isnan(m2.real).sum() == 1


def test_hr_trajectory_converges_to_targets(rng):
    d = np.concatenate([[0.05, 0.3], np.linspace(1, 4, 18)])
    A = SparseMatrix.diagonal(d)
    b = np.ones(20)
    _, tr = run_with_snapshots(A, b, 20, every=2)
    traj = hr_trajectory(tr, targets=np.array([0.05, 0.3]))
    assert traj.distances.shape[1] == 2
    # by the end both targets are captured well
    assert traj.distances[-1].max() < 1e-6
    t0 = traj.first_crossing(0, 0.1)
    assert t0 is not None and t0 <= 20


def test_plateau_detector_synthetic():
    r = np.concatenate([
        np.logspace(0, -1, 20),            # fast decay
        np.full(15, 1e-1),                 # flat plateau
        np.logspace(-1, -3, 10),           # sharp drop
        np.logspace(-3, -6, 40),           # steady tail
    ])
    ps = find_plateaus(r)
    assert len(ps) == 1
    p = ps[0]
    assert p.has_drop
    assert 18 <= p.start <= 22
    assert 30 <= p.end <= 38


def test_plateau_detector_no_false_positive():
    r = np.logspace(0, -8, 120)            # clean geometric decay
    assert find_plateaus(r) == []
