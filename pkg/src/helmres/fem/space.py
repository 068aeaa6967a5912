"""Lagrange triangle elements of degree 1-3 and quadrature rules.

Reference basis functions are built once per degree by inverting the
monomial Vandermonde on the standard node lattice.  Triangle quadrature
uses a collapsed Gauss product rule, exact to any requested degree, so a
single code path serves both the polynomial (non-PML) and the coordinate-
stretched integrands.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from helmres.errors import HelmresError
from helmres.fem.mesh import BoundaryTag, Mesh


@lru_cache(maxsize=None)
def gauss_1d(npts: int):
    """Gauss-Legendre nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(npts)
    return 0.5 * (x + 1.0), 0.5 * w


@lru_cache(maxsize=None)
def triangle_quadrature(degree: int):
    """Quadrature on the reference triangle exact to total ``degree``.

    Collapsed (Duffy) Gauss product rule: exactness requires
    2n - 1 >= degree + 1 per direction after the transform picks up the
    (1 - u) Jacobian.
    """
    n = (degree + 3) // 2
    u, wu = gauss_1d(n)
    v, wv = gauss_1d(n)
    pts, wts = [], []
    for i in range(n):
        for j in range(n):
            xi = u[i]
            eta = v[j] * (1.0 - u[i])
            pts.append((xi, eta))
            wts.append(wu[i] * wv[j] * (1.0 - u[i]))
    return np.array(pts), np.array(wts)


def _monomials(degree: int):
    return [(a, b) for total in range(degree + 1)
            for a in range(total, -1, -1) for b in [total - a]]


def _reference_nodes(degree: int) -> np.ndarray:
    """Node lattice: vertices, then edge nodes per edge, then interior."""
    p = degree
    verts = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]
    nodes = list(verts)
    edges = [(0, 1), (1, 2), (2, 0)]
    for a, b in edges:
        for s in range(1, p):
            t = s / p
            nodes.append(tuple((1 - t) * np.array(verts[a])
                               + t * np.array(verts[b])))
    if p == 3:
        nodes.append((1.0 / 3.0, 1.0 / 3.0))
    return np.array(nodes)


@dataclass(frozen=True)
class ReferenceElement:
    degree: int
    nodes: np.ndarray        # (ndof_local, 2)
    coeffs: np.ndarray       # (nmono, ndof_local): basis i = sum_k C[k,i] m_k
    monomials: tuple

    @property
    def ndof(self) -> int:
        return len(self.nodes)

    def eval(self, pts: np.ndarray) -> np.ndarray:
        """Basis values, shape (npts, ndof)."""
        pts = np.atleast_2d(pts)
        V = np.stack([pts[:, 0] ** a * pts[:, 1] ** b
                      for a, b in self.monomials], axis=1)
        return V @ self.coeffs

    def eval_grad(self, pts: np.ndarray) -> np.ndarray:
        """Reference gradients, shape (npts, ndof, 2)."""
        pts = np.atleast_2d(pts)
        x, y = pts[:, 0], pts[:, 1]
        dx = np.stack([a * x ** max(a - 1, 0) * y ** b if a > 0
                       else np.zeros_like(x) for a, b in self.monomials],
                      axis=1)
        dy = np.stack([b * x ** a * y ** max(b - 1, 0) if b > 0
                       else np.zeros_like(x) for a, b in self.monomials],
                      axis=1)
        return np.stack([dx @ self.coeffs, dy @ self.coeffs], axis=2)


@lru_cache(maxsize=None)
def reference_element(degree: int) -> ReferenceElement:
    if degree not in (1, 2, 3):
        raise HelmresError("supported degrees are 1, 2, 3")
    nodes = _reference_nodes(degree)
    monos = tuple(_monomials(degree))
    V = np.stack([nodes[:, 0] ** a * nodes[:, 1] ** b for a, b in monos],
                 axis=1)
    coeffs = np.linalg.inv(V)
    return ReferenceElement(degree=degree, nodes=nodes, coeffs=coeffs,
                            monomials=monos)


class FeSpace:
    """Global Lagrange space on a mesh.

    Dof order: vertex dofs (= vertex ids), then ``degree - 1`` dofs per
    mesh edge (ordered from the lower-numbered vertex), then interior
    dofs per triangle.  Dofs on Dirichlet-tagged boundary edges are marked
    constrained; the EXTERIOR tag is always Dirichlet and OBSTACLE follows
    the ``obstacle_dirichlet`` switch so both scattering cases share one
    space type.
    """

    def __init__(self, mesh: Mesh, degree: int, *,
                 obstacle_dirichlet: bool = False):
        self.mesh = mesh
        self.degree = degree
        self.ref = reference_element(degree)
        self.obstacle_dirichlet = obstacle_dirichlet

        p = degree
        nv = mesh.num_vertices
        edge_ids: dict = {}
        for tri in mesh.triangles:
            for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
                key = (min(a, b), max(a, b))
                if key not in edge_ids:
                    edge_ids[key] = len(edge_ids)
        self.edge_ids = edge_ids
        ne = len(edge_ids)
        n_int = {1: 0, 2: 0, 3: 1}[p]
        self.ndof_total = nv + ne * (p - 1) + mesh.num_triangles * n_int

        # element -> global dof map, honoring shared-edge orientation
        nt = mesh.num_triangles
        nloc = self.ref.ndof
        elem_dofs = np.empty((nt, nloc), dtype=np.int64)
        for t, tri in enumerate(mesh.triangles):
            dofs = [tri[0], tri[1], tri[2]]
            for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
                key = (min(a, b), max(a, b))
                base = nv + edge_ids[key] * (p - 1)
                local = list(range(base, base + p - 1))
                if a > b:
                    local = local[::-1]
                dofs.extend(local)
            if n_int:
                dofs.append(nv + ne * (p - 1) + t * n_int)
            elem_dofs[t] = dofs
        self.element_dofs = elem_dofs

        # dof coordinates via the reference nodes of each element
        coords = np.zeros((self.ndof_total, 2))
        pts = self.ref.nodes
        for t, tri in enumerate(mesh.triangles):
            v = mesh.vertices[tri]
            phys = (v[0][None, :]
                    + np.outer(pts[:, 0], v[1] - v[0])
                    + np.outer(pts[:, 1], v[2] - v[0]))
            coords[elem_dofs[t]] = phys
        self.dof_coords = coords

        # Dirichlet marking from tagged boundary edges; also remember which
        # tag put each dof on the boundary (EXTERIOR wins at junctions)
        dirichlet_tags = {BoundaryTag.DIRICHLET, BoundaryTag.EXTERIOR}
        if obstacle_dirichlet:
            dirichlet_tags.add(BoundaryTag.OBSTACLE)
        priority = {BoundaryTag.EXTERIOR: 4, BoundaryTag.DIRICHLET: 3,
                    BoundaryTag.OBSTACLE: 2, BoundaryTag.ROBIN: 1,
                    BoundaryTag.NEUMANN: 0}
        self.dirichlet_mask = np.zeros(self.ndof_total, dtype=bool)
        self.dof_tag = -np.ones(self.ndof_total, dtype=np.int64)
        for (a, b), tag in zip(mesh.boundary_edges, mesh.boundary_tags):
            tag = BoundaryTag(tag)
            key = (min(a, b), max(a, b))
            base = nv + edge_ids[key] * (p - 1)
            dofs = [a, b, *range(base, base + p - 1)]
            for d in dofs:
                cur = self.dof_tag[d]
                if cur < 0 or priority[BoundaryTag(cur)] < priority[tag]:
                    self.dof_tag[d] = tag
            if tag in dirichlet_tags:
                for d in dofs:
                    self.dirichlet_mask[d] = True

        self.free_dofs = np.where(~self.dirichlet_mask)[0]
        self.dirichlet_dofs = np.where(self.dirichlet_mask)[0]
        self.ndof_free = len(self.free_dofs)
        self.ndof_dirichlet = len(self.dirichlet_dofs)
        # global dof -> free index (-1 if constrained)
        self.free_index = -np.ones(self.ndof_total, dtype=np.int64)
        self.free_index[self.free_dofs] = np.arange(self.ndof_free)

    def boundary_edge_dofs(self, a: int, b: int) -> np.ndarray:
        """Dofs on edge (a, b) ordered from a to b."""
        p = self.degree
        key = (min(a, b), max(a, b))
        base = self.mesh.num_vertices + self.edge_ids[key] * (p - 1)
        mid = list(range(base, base + p - 1))
        if a > b:
            mid = mid[::-1]
        return np.array([a, *mid, b], dtype=np.int64)
