"""High-order curvilinear quadrilateral finite elements on disk domains."""

from helmres.fem.config import GeometryConfig
from helmres.fem.mesh import Mesh, build_disk_mesh, single_disk_mesh, dimer_mesh
from helmres.fem.space import FeSpace
from helmres.fem.assemble import assemble, boundary_fourier, build_problem

__all__ = [
    "GeometryConfig",
    "Mesh",
    "build_disk_mesh",
    "single_disk_mesh",
    "dimer_mesh",
    "FeSpace",
    "assemble",
    "boundary_fourier",
    "build_problem",
]
