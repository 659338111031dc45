"""Assembly of the FEM matrices A, M and the boundary Fourier vectors q^nu.

A is the gradient-gradient (stiffness) matrix, M the eta^2-weighted mass
matrix; q_j^nu = (1/sqrt(2 pi)) int_0^{2pi} phi_j(a, theta) e^{-i nu theta}
d theta collects the Fourier trace of each boundary shape function.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sps

from helmres.errors import GeometryError, MeshError
from helmres.fem.basis import (
    differentiation_matrix,
    gauss_points,
    lagrange_derivative_matrix,
    lagrange_matrix,
)
from helmres.fem.config import GeometryConfig
from helmres.fem.mesh import build_disk_mesh, dimer_mesh, single_disk_mesh
from helmres.fem.space import FeSpace


def assemble(space: FeSpace, material: dict[int, float] | None = None):
    """Sparse (A, M); ``material`` maps cell region ids to eta^2 values."""
    if material is None:
        material = {}
    p = space.p
    ng = p + 2
    gp, gw = gauss_points(ng)
    L = lagrange_matrix(space.nodes_1d, gp)  # (ng, p+1)
    D = lagrange_derivative_matrix(space.nodes_1d, gp)
    w2 = gw[:, None] * gw[None, :]
    xi, eta = np.meshgrid(gp, gp, indexing="ij")
    # Reference values/gradients of the tensor basis at the quad grid,
    # flattened to (ng*ng, (p+1)^2) with local index l = i*(p+1)+j.
    phi = np.einsum("ai,bj->abij", L, L).reshape(ng * ng, -1)
    dphi_dxi = np.einsum("ai,bj->abij", D, L).reshape(ng * ng, -1)
    dphi_deta = np.einsum("ai,bj->abij", L, D).reshape(ng * ng, -1)
    rows, cols, a_vals, m_vals = [], [], [], []
    for ci, cell in enumerate(space.mesh.cells):
        x, y, xs, xt, ys, yt = cell.map(xi, eta)
        det = (xs * yt - xt * ys).ravel()
        if np.any(det <= 0):
            raise MeshError(f"non-positive Jacobian in cell {ci}")
        w = (w2.ravel()) * det
        # Physical gradients: J^{-T} applied to reference gradients.
        xs, xt, ys, yt = (v.ravel()[:, None] for v in (xs, xt, ys, yt))
        inv_det = 1.0 / det[:, None]
        gx = (yt * dphi_dxi - ys * dphi_deta) * inv_det
        gy = (-xt * dphi_dxi + xs * dphi_deta) * inv_det
        Ae = (gx * w[:, None]).T @ gx + (gy * w[:, None]).T @ gy
        eta2 = material.get(cell.region, 1.0)
        Me = eta2 * (phi * w[:, None]).T @ phi
        dofs = space.dofmap[ci]
        r = np.repeat(dofs, dofs.shape[0])
        c = np.tile(dofs, dofs.shape[0])
        rows.append(r)
        cols.append(c)
        a_vals.append(Ae.ravel())
        m_vals.append(Me.ravel())
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    shape = (space.N, space.N)
    A = sps.coo_matrix((np.concatenate(a_vals), (rows, cols)), shape=shape).tocsr()
    M = sps.coo_matrix((np.concatenate(m_vals), (rows, cols)), shape=shape).tocsr()
    return A, M


#: Boundary quadrature points per oscillation period per edge.
C_OSC = 2.0


def boundary_quad_count(p: int, nu: int) -> int:
    """n_q(nu) = max(2p+2, ceil(c*nu) + p) boundary Gauss points per edge."""
    return max(2 * p + 2, int(np.ceil(C_OSC * nu)) + p)


def boundary_fourier(space: FeSpace, nu_max: int) -> np.ndarray:
    """Fourier trace vectors q^nu, nu = 0..nu_max, over the boundary dofs.

    Returns a (nu_max+1, N_a) array; entries for interior dofs vanish by
    construction and are not stored.
    """
    outer = [ci for ci, cell in enumerate(space.mesh.cells) if cell.on_outer]
    if not outer:
        raise MeshError("space has no boundary edges on Gamma_a")
    q = np.zeros((nu_max + 1, space.N_a), dtype=complex)
    groups: dict[int, list[int]] = {}
    for nu in range(nu_max + 1):
        groups.setdefault(boundary_quad_count(space.p, nu), []).append(nu)
    for nq, nus in groups.items():
        gp, gw = gauss_points(nq)
        L = lagrange_matrix(space.nodes_1d, gp)
        for ci in outer:
            cell = space.mesh.cells[ci]
            x, y, _, xt, _, yt = cell.map(np.ones_like(gp), gp)
            r2 = x * x + y * y
            theta = np.arctan2(y, x)
            dtheta = np.abs(x * yt - y * xt) / r2
            dofs = space.edge_dofs_outer(ci)
            for nu in nus:
                phase = np.exp(-1j * nu * theta) * gw * dtheta
                q[nu, dofs] += (phase @ L) / np.sqrt(2.0 * np.pi)
    return q


def build_problem(config: GeometryConfig):
    """Mesh, assemble and Fourier-trace a benchmark geometry.

    Returns (nep, space) with the DtnNep matrix family and the FE space.
    """
    from helmres.nep import DtnNep

    if config.kind == "empty":
        mesh = build_disk_mesh(config.a, max(config.levels, 1))
        material = {}
    elif config.kind == "single_disk":
        if config.d + config.R >= config.a:
            raise GeometryError("resonator disk must lie strictly inside Gamma_a")
        mesh = single_disk_mesh(config.R, config.d, config.a, levels=config.levels)
        material = {1: config.eta_s**2}
    elif config.kind == "dimer":
        mesh = dimer_mesh(config.R, config.s, config.a, levels=config.levels)
        material = {1: config.eta_s**2}
    else:  # pragma: no cover - guarded by GeometryConfig
        raise GeometryError(f"unsupported geometry kind {config.kind!r}")
    space = FeSpace(mesh, config.p)
    A, M = assemble(space, material)
    q = boundary_fourier(space, config.nu_max)
    return DtnNep(A, M, q, config.a, config.nu_max), space
