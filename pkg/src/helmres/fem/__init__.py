from helmres.fem.mesh import (
    BoundaryTag,
    Mesh,
    RegionTag,
    ScatterGeometry,
    build_mesh_cavity,
    build_mesh_scatter,
    save_mesh_text,
)
from helmres.fem.space import FeSpace, triangle_quadrature
from helmres.fem.assemble import (
    CavityProblem,
    LinearSystem,
    PmlProfile,
    ScatterProblem,
    assemble,
    assemble_matrices,
    l2_error,
    project_mode,
)
from helmres.fem import analytic

__all__ = [
    "BoundaryTag",
    "CavityProblem",
    "FeSpace",
    "LinearSystem",
    "Mesh",
    "PmlProfile",
    "RegionTag",
    "ScatterGeometry",
    "ScatterProblem",
    "analytic",
    "assemble",
    "assemble_matrices",
    "build_mesh_cavity",
    "build_mesh_scatter",
    "l2_error",
    "project_mode",
    "save_mesh_text",
    "triangle_quadrature",
]
