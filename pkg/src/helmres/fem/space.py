"""Continuous degree-p nodal space on a curvilinear quadrilateral mesh.

Global degrees of freedom are obtained by geometric identification of the
Gauss-Lobatto tensor nodes of neighbouring cells; the N_a nodes on the
truncation circle Gamma_a are numbered first, sorted by polar angle.
"""

from __future__ import annotations

import numpy as np

from helmres.errors import MeshError
from helmres.fem.basis import gauss_lobatto
from helmres.fem.mesh import Mesh

#: Two nodes closer than this are identified.
MERGE_TOL = 1e-9


class FeSpace:
    """Mesh + degree; exposes the global dof map and node coordinates."""

    def __init__(self, mesh: Mesh, p: int):
        if p < 1:
            raise ValueError("degree must be >= 1")
        self.mesh = mesh
        self.p = p
        self.nodes_1d = gauss_lobatto(p)
        self._number_dofs()

    def _cell_nodes(self, cell) -> np.ndarray:
        """Physical coordinates of the (p+1)^2 tensor nodes of one cell."""
        xi, eta = np.meshgrid(self.nodes_1d, self.nodes_1d, indexing="ij")
        x, y, *_ = cell.map(xi, eta)
        return np.stack([x.ravel(), y.ravel()], axis=1)

    def _number_dofs(self) -> None:
        scale = 1.0 / MERGE_TOL
        index: dict[tuple[int, int], int] = {}
        coords: list[tuple[float, float]] = []
        dofmap = np.empty((self.mesh.cell_count, (self.p + 1) ** 2), dtype=np.int64)
        for ci, cell in enumerate(self.mesh.cells):
            pts = self._cell_nodes(cell)
            for li, (x, y) in enumerate(pts):
                ix = int(round(x * scale))
                iy = int(round(y * scale))
                gid = -1
                for dx in (0, -1, 1):
                    for dy in (0, -1, 1):
                        gid = index.get((ix + dx, iy + dy), -1)
                        if gid >= 0:
                            break
                    if gid >= 0:
                        break
                if gid < 0:
                    gid = len(coords)
                    coords.append((float(x), float(y)))
                    index[(ix, iy)] = gid
                dofmap[ci, li] = gid
        xy = np.asarray(coords)
        r = np.hypot(xy[:, 0], xy[:, 1])
        on_boundary = np.abs(r - self.mesh.a) < 1e-8 * max(self.mesh.a, 1.0)
        # Sanity: boundary nodes must come from on_outer cell edges.
        if not np.any(on_boundary):
            raise MeshError("mesh has no nodes on Gamma_a")
        theta = np.mod(np.arctan2(xy[:, 1], xy[:, 0]), 2.0 * np.pi)
        bnd = np.nonzero(on_boundary)[0]
        bnd = bnd[np.argsort(theta[bnd])]
        interior = np.nonzero(~on_boundary)[0]
        order = np.concatenate([bnd, interior])
        perm = np.empty(order.shape[0], dtype=np.int64)
        perm[order] = np.arange(order.shape[0])
        self.dofmap = perm[dofmap]
        self.node_xy = xy[order]
        self.N = xy.shape[0]
        self.N_a = bnd.shape[0]

    def edge_dofs_outer(self, ci: int) -> np.ndarray:
        """Global dofs of the xi = +1 edge of cell ci (the Gamma_a edge)."""
        p = self.p
        local = p * (p + 1) + np.arange(p + 1)
        return self.dofmap[ci, local]
