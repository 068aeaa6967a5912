import numpy as np
import pytest

from helmres import ContourError, HelmresError
from helmres.diagnostics import (Contour, circle_contour, default_contour,
                                 deflation_ratio, pseudospectrum_bound,
                                 spectral_projector, spectrum_bound,
                                 resolvent_grid)
from helmres.krylov import GmresOptions, gmres
from helmres.linalg import SparseMatrix, eig_dense


def solve_traced(A, b, l_max):
    return gmres(A, b, GmresOptions(tol=1e-15, max_iter=l_max,
                                    record="snapshots", snapshot_every=1))


def random_diagonalizable(rng, n, small=1e-2):
    """Well-conditioned eigenvectors, one eigenvalue near the origin."""
    lam = (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    lam = lam + np.sign(lam.real) * 1.0
    lam[0] = small * np.exp(2j * np.pi * rng.random())
    V = np.eye(n) + 0.3 * rng.standard_normal((n, n))
    a = V @ np.diag(lam) @ np.linalg.inv(V)
    return SparseMatrix.from_dense(a), lam


def test_spectrum_bound_normal_kappa_term(rng):
    d = np.concatenate([[0.01], np.linspace(1, 2, 7)])
    A = SparseMatrix.diagonal(d)
    b = rng.standard_normal(8)
    _, tr = solve_traced(A, b, 6)
    eig = eig_dense(A.to_dense())
    rep = spectrum_bound(eig, tr, l=3, m=2, select_J=1)
    assert rep.term_kappa == pytest.approx(7.0, rel=1e-9)
    assert rep.bound >= rep.measured


def test_spectrum_bound_empty_J_is_classical(rng):
    A = SparseMatrix.diagonal(np.linspace(1, 3, 9))
    b = rng.standard_normal(9)
    _, tr = solve_traced(A, b, 7)
    eig = eig_dense(A.to_dense())
    rep = spectrum_bound(eig, tr, l=2, m=3, select_J=None)
    assert rep.term_s == 1.0
    assert len(rep.lambdas_J) == 0
    assert rep.bound >= rep.measured


def test_spectrum_bound_validity_random_suite(rng):
    violations = 0
    trials = 0
    for _ in range(25):
        n = int(rng.integers(6, 13))
        A, lam = random_diagonalizable(rng, n)
        b = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        _, tr = solve_traced(A, b, n - 1)
        eig = eig_dense(A.to_dense())
        lmax = min(tr.iterations, n - 2)
        for l in range(1, lmax):
            for m in range(1, lmax - l + 1):
                rep = spectrum_bound(eig, tr, l, m, select_J=1)
                trials += 1
                if not rep.valid:
                    violations += 1
    assert trials > 100
    assert violations == 0


def test_spectrum_bound_requires_snapshot(rng):
    A = SparseMatrix.diagonal(np.linspace(1, 2, 8))
    b = rng.standard_normal(8)
    _, tr = gmres(A, b, GmresOptions(tol=1e-14, max_iter=8,
                                     record="snapshots", snapshot_every=100))
    eig = eig_dense(A.to_dense())
    with pytest.raises(HelmresError):
        spectrum_bound(eig, tr, l=3, m=2, select_J=1)


def test_contour_circle_eps_equals_distance_for_normal(rng):
    d = np.concatenate([[0.05], np.linspace(2.0, 3.0, 7)])
    A = SparseMatrix.diagonal(d)
    b = rng.standard_normal(8)
    _, tr = solve_traced(A, b, 6)
    contour = circle_contour(2.5, 1.0, 64)
    rep = pseudospectrum_bound(A, d, contour, tr, l=3, m=2, select_J=1)
    zs = contour.sample(128)
    dist = np.min(np.abs(zs[:, None] - d[None, :]), axis=1)
    assert rep.extras["eps"] == pytest.approx(float(dist.min()), rel=1e-6)
    assert rep.bound >= rep.measured


def test_contour_eps_below_distance_always(rng):
    # near-defective block inside the contour pushes eps below the
    # distance to the spectrum
    a = np.array([[1.0, 100.0], [0.0, 1.001]])
    full = np.zeros((6, 6))
    full[:2, :2] = a
    full[2:, 2:] = np.diag([3.0, 3.5, 4.0, 4.5])
    A = SparseMatrix.from_dense(full)
    b = np.ones(6)
    _, tr = solve_traced(A, b, 6)
    contour = circle_contour(1.0, 0.5, 64)
    lam = np.linalg.eigvals(full)
    rep = pseudospectrum_bound(
        A, lam, contour, tr, l=4, m=1,
        select_J=np.where(lam.real > 2)[0])
    zs = contour.sample(128)
    dist = float(np.min(np.abs(zs[:, None] - lam[None, :])))
    assert rep.extras["eps"] <= dist * (1 + 1e-9)
    assert rep.extras["eps"] < 0.2 * dist   # non-normality visible


def test_contour_enclosure_errors(rng):
    d = np.linspace(1, 2, 6)
    A = SparseMatrix.diagonal(d)
    b = rng.standard_normal(6)
    _, tr = solve_traced(A, b, 4)
    bad = circle_contour(10.0, 0.5, 32)       # encloses nothing
    with pytest.raises(ContourError):
        pseudospectrum_bound(A, d, bad, tr, l=2, m=1, select_J=1)
    through = circle_contour(float(d[0] + 1.0), 1.0, 32)
    with pytest.raises(ContourError):
        pseudospectrum_bound(A, d, through, tr, l=2, m=1,
                             select_J=np.array([0]))


def test_default_contour_keyhole_excludes_interior_point():
    inside = np.array([-0.14, -0.05, 0.5, 1.0, 2.0], dtype=complex)
    outside = np.array([-0.001 + 0j])
    c = default_contour(inside, outside)
    assert all(c.contains(z) for z in inside)
    assert not c.contains(outside[0])
    assert c.length > 0


def test_default_contour_without_exclusions():
    inside = np.array([1.0, 2.0, 1.5 + 0.5j])
    c = default_contour(inside, np.array([], dtype=complex))
    assert all(c.contains(z) for z in inside)


def test_pseudospectrum_bound_validity_keyhole_suite(rng):
    violations = 0
    trials = 0
    for _ in range(8):
        n = 10
        d = np.concatenate([[0.02 + 0.01j],
                            rng.standard_normal(n - 1)
                            + 1j * 0.2 * rng.standard_normal(n - 1)])
        d[1:] += np.sign(d[1:].real) * 1.5
        A = SparseMatrix.diagonal(d)
        b = rng.standard_normal(n) + 0j
        _, tr = solve_traced(A, b, n - 2)
        contour = default_contour(d[1:], d[:1])
        for l in (2, 4, 6):
            if l not in tr.snapshots:
                continue
            rep = pseudospectrum_bound(A, d, contour, tr, l=l, m=2,
                                       select_J=1)
            trials += 1
            if not rep.valid:
                violations += 1
    assert trials >= 15
    assert violations == 0


def test_spectral_projector_completeness(rng):
    a = rng.standard_normal((10, 10)) + 1j * rng.standard_normal((10, 10))
    eig = eig_dense(a)
    P_all = spectral_projector(eig, list(range(10)))
    assert np.linalg.norm(P_all - np.eye(10)) <= 1e-10 * 10
    P_none = spectral_projector(eig, None)
    assert np.linalg.norm(P_none) == 0.0


def test_spectral_projector_annihilates_ratio_function(rng):
    # s(A) = P_Jc s(A): the ratio function lives on the unmatched subspace
    a = rng.standard_normal((10, 10)) + 0.5 * np.eye(10)
    eig = eig_dense(a)
    idx_J = [0, 1]
    lam_J = eig.values[idx_J]
    nu_J = lam_J * (1 + 0.2 * rng.standard_normal(2))
    sA = np.eye(10, dtype=complex)
    for lam in lam_J:
        sA = sA @ (np.eye(10) - a / lam)
    for nu in nu_J:
        sA = sA @ np.linalg.inv(np.eye(10) - a / nu)
    P_Jc = spectral_projector(eig, [i for i in range(10) if i not in idx_J])
    assert np.linalg.norm(sA - P_Jc @ sA) <= 1e-8 * np.linalg.norm(sA)


def test_spectral_projector_idempotent_and_commutes(rng):
    a = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    eig = eig_dense(a)
    P = spectral_projector(eig, [0, 1, 2])
    assert np.linalg.norm(P @ P - P) <= 1e-8 * np.linalg.norm(P)
    assert np.linalg.norm(P @ a - a @ P) <= 1e-8 * np.linalg.norm(a)


def test_resolvent_grid_normal_is_distance():
    d = np.array([1.0, 2.0, 3.0 + 1.0j])
    A = SparseMatrix.diagonal(d)
    out = resolvent_grid(A, (0.0, 4.0, -1.0, 2.0), 9, 7)
    for j, im in enumerate(out["im"]):
        for i, re in enumerate(out["re"]):
            z = re + 1j * im
            dist = np.min(np.abs(d - z))
            assert out["smin"][j, i] == pytest.approx(dist, rel=1e-8,
                                                      abs=1e-12)


def test_resolvent_grid_nonnormal_strictly_below_distance():
    a = np.array([[0.5, 1.0], [0.0, 0.5]])
    A = SparseMatrix.from_dense(a)
    out = resolvent_grid(A, (0.6, 0.6, 0.0, 0.0), 1, 1)
    smin = out["smin"][0, 0]
    assert smin < abs(0.6 - 0.5)
