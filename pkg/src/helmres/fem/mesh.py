"""Structured triangulations of the two benchmark domains.

Both meshes are grid-aligned: the closed cavity is the unit square split
into two triangles per grid cell, and the scattering domain is a square
box (physical region plus absorbing layer) with the open-cavity obstacle
walls punched out of the grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import IntEnum
from pathlib import Path

import numpy as np

from helmres.errors import HelmresError


class BoundaryTag(IntEnum):
    DIRICHLET = 0
    NEUMANN = 1
    ROBIN = 2
    EXTERIOR = 3       # outer truncation boundary (homogeneous Dirichlet)
    OBSTACLE = 4       # obstacle wall; condition chosen per case


class RegionTag(IntEnum):
    INTERIOR = 0
    PML_X = 1
    PML_Y = 2
    PML_XY = 3


@dataclass
class Mesh:
    """Conforming triangle mesh with tagged boundary edges and regions.

    ``boundary_edges`` lists vertex pairs (lo, hi); every boundary edge
    carries exactly one tag.  ``region_tags`` has one entry per triangle.
    """

    vertices: np.ndarray          # (nv, 2)
    triangles: np.ndarray         # (nt, 3) positively oriented
    boundary_edges: np.ndarray    # (nbe, 2)
    boundary_tags: np.ndarray     # (nbe,)
    region_tags: np.ndarray       # (nt,)
    meta: dict = field(default_factory=dict)

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_triangles(self) -> int:
        return len(self.triangles)

    def triangle_areas(self) -> np.ndarray:
        p = self.vertices[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def boundary_tag_of(self) -> dict:
        return {tuple(sorted(e)): t
                for e, t in zip(self.boundary_edges, self.boundary_tags)}

    def validate(self) -> None:
        if np.any(self.triangle_areas() <= 0):
            raise HelmresError("mesh has non-positively-oriented triangles")
        counts = _edge_incidence(self.triangles)
        boundary = {e for e, c in counts.items() if c == 1}
        interior_bad = [e for e, c in counts.items() if c not in (1, 2)]
        if interior_bad:
            raise HelmresError(f"non-conforming edges: {interior_bad[:3]}")
        tagged = {tuple(sorted(e)) for e in self.boundary_edges}
        if tagged != boundary:
            raise HelmresError("boundary tags do not cover the boundary "
                               "exactly once")


def _edge_incidence(triangles) -> dict:
    counts: dict = {}
    for tri in triangles:
        for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
            key = (min(a, b), max(a, b))
            counts[key] = counts.get(key, 0) + 1
    return counts


def _check_grid(value: float, h: float, what: str) -> int:
    q = value / h
    if abs(q - round(q)) > 1e-9:
        raise HelmresError(f"{what} = {value} is not aligned to the h-grid")
    return int(round(q))


def _grid_triangulation(nx: int, ny: int):
    """Vertices and triangles of an nx-by-ny cell grid on unit index space."""
    vid = lambda i, j: j * (nx + 1) + i
    tris = []
    for j in range(ny):
        for i in range(nx):
            v00, v10 = vid(i, j), vid(i + 1, j)
            v01, v11 = vid(i, j + 1), vid(i + 1, j + 1)
            tris.append((v00, v10, v11))
            tris.append((v00, v11, v01))
    return np.array(tris, dtype=np.int64)


CAVITY_JITTER_DEFAULT = 0.10
_CAVITY_JITTER_SEED = 987654321


def build_mesh_cavity(h: float, *, jitter: float = CAVITY_JITTER_DEFAULT,
                      seed: int = _CAVITY_JITTER_SEED) -> Mesh:
    """Triangulation of the unit square, all boundary edges Dirichlet.

    ``1/h`` must be an integer; each grid square is split into two
    triangles along the same diagonal.  Interior vertices are perturbed by
    a deterministic jitter of amplitude ``jitter * h`` (pass 0 for the
    exact lattice).  An exactly regular lattice is symmetric under the
    half-turn of the square, which annihilates the source components of
    every mode with n + m odd and with them the resonance responses the
    benchmark measures; the jitter restores the generic excitation an
    unstructured mesh of the same density would have.
    """
    if not (0 < h <= 0.5):
        raise HelmresError("need 0 < h <= 1/2")
    n = 1.0 / h
    if abs(n - round(n)) > 1e-9:
        raise HelmresError(f"1/h = {n} is not an integer")
    n = int(round(n))
    xs = np.linspace(0.0, 1.0, n + 1)
    X, Y = np.meshgrid(xs, xs, indexing="xy")
    vertices = np.column_stack([X.ravel(), Y.ravel()])
    if jitter > 0.0:
        rng = np.random.default_rng(seed)
        offsets = (rng.random(vertices.shape) - 0.5) * 2.0 * jitter * h
        interior = ((vertices[:, 0] > 1e-12) & (vertices[:, 0] < 1 - 1e-12)
                    & (vertices[:, 1] > 1e-12) & (vertices[:, 1] < 1 - 1e-12))
        vertices[interior] += offsets[interior]
    triangles = _grid_triangulation(n, n)
    vid = lambda i, j: j * (n + 1) + i
    edges = []
    for i in range(n):
        edges.append((vid(i, 0), vid(i + 1, 0)))
        edges.append((vid(i, n), vid(i + 1, n)))
        edges.append((vid(0, i), vid(0, i + 1)))
        edges.append((vid(n, i), vid(n, i + 1)))
    boundary_edges = np.array([(min(a, b), max(a, b)) for a, b in edges],
                              dtype=np.int64)
    boundary_tags = np.full(len(edges), BoundaryTag.DIRICHLET, dtype=np.int64)
    region_tags = np.full(len(triangles), RegionTag.INTERIOR, dtype=np.int64)
    mesh = Mesh(vertices, triangles, boundary_edges, boundary_tags,
                region_tags, meta={"benchmark": "cavity", "h": h,
                                   "jitter": jitter})
    return mesh


@dataclass(frozen=True)
class ScatterGeometry:
    """Open-cavity scattering geometry.

    The obstacle is a U-shaped wall of thickness ``wall_t`` around a
    rectangular cavity of interior length ``L_obstacle`` (along x) and
    opening width ``l_opening`` (along y).  The opening faces -x by
    default.  The box half-width ``L`` and layer thickness ``L_pml`` are
    sized so the assembled system lands near the benchmark's operating
    point of roughly 13,500 unknowns at h = 1/20 with cubic elements.
    """

    L: float = 0.8
    L_pml: float = 0.2
    L_obstacle: float = 1.3
    l_opening: float = 0.4
    wall_t: float = 0.1
    h: float = 1.0 / 20.0
    opening: str = "-x"

    def wall_rectangles(self):
        """The three wall rectangles [(x0, x1, y0, y1), ...]."""
        W = self.L_obstacle + self.wall_t
        hw, hy = W / 2.0, self.l_opening / 2.0
        top = (-hw, hw, hy, hy + self.wall_t)
        bot = (-hw, hw, -hy - self.wall_t, -hy)
        end = (hw - self.wall_t, hw, -hy, hy)
        if self.opening == "-x":
            return [top, bot, end]
        if self.opening == "+x":
            end = (-hw, -hw + self.wall_t, -hy, hy)
            return [top, bot, end]
        raise HelmresError(f"unsupported opening {self.opening!r}")

    def cavity_interior(self):
        """(x0, x1, y0, y1) of the open cavity interior."""
        W = self.L_obstacle + self.wall_t
        hw, hy = W / 2.0, self.l_opening / 2.0
        if self.opening == "-x":
            return (-hw, hw - self.wall_t, -hy, hy)
        return (-hw + self.wall_t, hw, -hy, hy)


def build_mesh_scatter(geom: ScatterGeometry) -> Mesh:
    """Grid-aligned triangulation of the PML-truncated scattering domain.

    The outer boundary is tagged EXTERIOR, obstacle walls OBSTACLE, and
    triangles in the absorbing layer get PML region tags from their
    centroid coordinates.
    """
    h = geom.h
    half = geom.L + geom.L_pml
    n = 2 * _check_grid(half, h, "L + L_pml")
    _check_grid(geom.L, h, "L")
    walls = geom.wall_rectangles()
    for r in walls:
        for c in r:
            _check_grid(abs(c), h, "obstacle coordinate")
        if not (-geom.L < r[0] and r[1] < geom.L
                and -geom.L < r[2] and r[3] < geom.L):
            raise HelmresError("obstacle touches or enters the PML layer")

    xs = np.linspace(-half, half, n + 1)
    X, Y = np.meshgrid(xs, xs, indexing="xy")
    vertices = np.column_stack([X.ravel(), Y.ravel()])
    triangles = _grid_triangulation(n, n)

    centroids = vertices[triangles].mean(axis=1)
    inside_wall = np.zeros(len(triangles), dtype=bool)
    for (x0, x1, y0, y1) in walls:
        inside_wall |= ((centroids[:, 0] > x0) & (centroids[:, 0] < x1)
                        & (centroids[:, 1] > y0) & (centroids[:, 1] < y1))
    keep = ~inside_wall
    triangles = triangles[keep]
    centroids = centroids[keep]

    # re-index vertices actually used
    used = np.unique(triangles)
    remap = -np.ones(len(vertices), dtype=np.int64)
    remap[used] = np.arange(len(used))
    vertices = vertices[used]
    triangles = remap[triangles]

    region_tags = np.full(len(triangles), RegionTag.INTERIOR, dtype=np.int64)
    in_x = np.abs(centroids[:, 0]) > geom.L
    in_y = np.abs(centroids[:, 1]) > geom.L
    region_tags[in_x & ~in_y] = RegionTag.PML_X
    region_tags[~in_x & in_y] = RegionTag.PML_Y
    region_tags[in_x & in_y] = RegionTag.PML_XY

    counts = _edge_incidence(triangles)
    boundary = sorted(e for e, c in counts.items() if c == 1)
    edges, tags = [], []
    for (a, b) in boundary:
        pa, pb = vertices[a], vertices[b]
        on_outer = (np.allclose(np.abs([pa[0], pb[0]]), half)
                    and np.isclose(pa[0], pb[0])) or \
                   (np.allclose(np.abs([pa[1], pb[1]]), half)
                    and np.isclose(pa[1], pb[1]))
        edges.append((a, b))
        tags.append(BoundaryTag.EXTERIOR if on_outer else BoundaryTag.OBSTACLE)
    mesh = Mesh(vertices, triangles, np.array(edges, dtype=np.int64),
                np.array(tags, dtype=np.int64), region_tags,
                meta={"benchmark": "scatter", "h": h, "geom": geom})
    return mesh


def save_mesh_text(path: str | Path, mesh: Mesh) -> None:
    """Plain-text node/element export."""
    with open(path, "w") as f:
        f.write(f"nodes {mesh.num_vertices}\n")
        for x, y in mesh.vertices:
            f.write(f"{x!r} {y!r}\n")
        f.write(f"triangles {mesh.num_triangles}\n")
        for (a, b, c), t in zip(mesh.triangles, mesh.region_tags):
            f.write(f"{a} {b} {c} {t}\n")
        f.write(f"boundary_edges {len(mesh.boundary_edges)}\n")
        for (a, b), t in zip(mesh.boundary_edges, mesh.boundary_tags):
            f.write(f"{a} {b} {t}\n")


def with_boundary_tag(mesh: Mesh, tag: BoundaryTag) -> Mesh:
    """Copy of the mesh with every boundary edge re-tagged (test helper)."""
    return replace(mesh, boundary_tags=np.full(len(mesh.boundary_edges),
                                               tag, dtype=np.int64))
