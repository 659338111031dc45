"""FEM discretization: meshes, spaces, assembly, boundary Fourier vectors."""

import json

import numpy as np
import pytest

from helmres.errors import ConfigError, GeometryError, MeshError
from helmres.fem import (
    FeSpace,
    GeometryConfig,
    assemble,
    boundary_fourier,
    build_disk_mesh,
    build_problem,
    dimer_mesh,
    single_disk_mesh,
)
from helmres.fem.mesh import Cell, Mesh, bilinear_block
from helmres.tiar import tiar_run


def total_mass(nep_or_matrices):
    A, M = nep_or_matrices
    one = np.ones(M.shape[0])
    return float(one @ (M @ one))


def test_disk_mesh_base_cells():
    mesh = build_disk_mesh(2.0, 0)
    assert mesh.cell_count == 5
    assert build_disk_mesh(2.0, 1).cell_count == 20
    assert build_disk_mesh(2.0, 2).cell_count == 80


def test_disk_area():
    mesh = build_disk_mesh(2.0, 2)
    space = FeSpace(mesh, 5)
    A, M = assemble(space)
    area = total_mass((A, M))
    assert abs(area - np.pi * 4.0) < 1e-10 * np.pi * 4.0


def test_boundary_first_ordering():
    mesh = single_disk_mesh(1.0, 0.5, 2.0, levels=0)
    space = FeSpace(mesh, 4)
    r = np.hypot(space.node_xy[:, 0], space.node_xy[:, 1])
    assert np.all(np.abs(r[: space.N_a] - 2.0) < 1e-8)
    assert np.all(r[space.N_a :] < 2.0 - 1e-8)
    # Sorted boundary angles partition [0, 2pi): strictly increasing, no wrap.
    theta = np.mod(np.arctan2(space.node_xy[: space.N_a, 1], space.node_xy[: space.N_a, 0]), 2 * np.pi)
    assert np.all(np.diff(theta) > 0)


def test_bilinear_unit_square_element():
    block = bilinear_block((0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0))
    mesh = Mesh(a=np.sqrt(2.0), cells=(Cell(block, 0.0, 1.0, 0.0, 1.0),))
    space = FeSpace(mesh, 1)
    A, M = assemble(space)
    A, M = A.toarray(), M.toarray()
    xy = space.node_xy
    # Textbook bilinear element on the unit square, keyed by node geometry.
    for i in range(4):
        for j in range(4):
            d = np.abs(xy[i] - xy[j]).sum()
            if d == 0:
                a_ref, m_ref = 2.0 / 3.0, 1.0 / 9.0
            elif d == 1.0:
                a_ref, m_ref = -1.0 / 6.0, 1.0 / 18.0
            else:  # diagonal neighbor
                a_ref, m_ref = -1.0 / 3.0, 1.0 / 36.0
            assert abs(A[i, j] - a_ref) < 1e-14
            assert abs(M[i, j] - m_ref) < 1e-14


def test_stiffness_annihilates_constants():
    mesh = single_disk_mesh(1.0, 0.5, 2.0, levels=0)
    space = FeSpace(mesh, 4)
    A, _ = assemble(space, {1: 4.0})
    one = np.ones(space.N)
    assert np.abs(A @ one).max() < 1e-10 * np.abs(A.diagonal()).max()


def test_single_disk_weighted_mass():
    # int eta^2 = pi a^2 + (eta_s^2 - 1) pi R^2 = 7 pi for the benchmark.
    mesh = single_disk_mesh(1.0, 0.5, 2.0, levels=0)
    space = FeSpace(mesh, 6)
    m = total_mass(assemble(space, {1: 4.0}))
    assert abs(m - 7.0 * np.pi) < 1e-8 * 7.0 * np.pi


def test_dimer_weighted_mass():
    # Two disks of radius 1/4, eta_s^2 = 4, a = 1: pi (1 + 3 * 2 / 16).
    mesh = dimer_mesh(0.25, 0.25, 1.0, levels=0)
    space = FeSpace(mesh, 6)
    m = total_mass(assemble(space, {1: 4.0}))
    expected = np.pi * (1.0 + 6.0 / 16.0)
    assert abs(m - expected) < 1e-8 * expected


def test_jacobian_positive_everywhere():
    for mesh in (
        single_disk_mesh(1.0, 0.5, 2.0, levels=1),
        dimer_mesh(0.25, 0.25, 1.0, levels=0),
        dimer_mesh(0.25, 0.25, 2.0, levels=0),
    ):
        space = FeSpace(mesh, 3)
        assemble(space)  # raises MeshError on non-positive Jacobians


def test_negative_jacobian_detected():
    # Inverted quadrilateral (swapped corners).
    block = bilinear_block((0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0))
    mesh = Mesh(a=np.sqrt(2.0), cells=(Cell(block, 0.0, 1.0, 0.0, 1.0),))
    space = FeSpace(mesh, 1)
    with pytest.raises(MeshError):
        assemble(space)


def test_boundary_fourier_constant_mode():
    mesh = single_disk_mesh(1.0, 0.5, 2.0, levels=0)
    space = FeSpace(mesh, 5)
    q = boundary_fourier(space, 3)
    # sum_j q_j^0 = (1/sqrt(2 pi)) int dtheta = sqrt(2 pi).
    assert abs(q[0].sum() - np.sqrt(2.0 * np.pi)) < 1e-10
    assert np.abs(q[0].imag).max() < 1e-10


def test_boundary_fourier_orthogonality():
    mesh = single_disk_mesh(1.0, 0.5, 2.0, levels=0)
    space = FeSpace(mesh, 8)
    q = boundary_fourier(space, 8)
    theta = np.arctan2(space.node_xy[: space.N_a, 1], space.node_xy[: space.N_a, 0])
    nu0 = 3
    u = np.exp(1j * nu0 * theta)  # boundary interpolant of e^{i nu0 theta}
    coeffs = q @ u
    assert abs(coeffs[nu0]) > 1.0
    for nu in range(9):
        if nu != nu0:
            assert abs(coeffs[nu]) < 1e-8 * abs(coeffs[nu0])


def test_boundary_fourier_parseval():
    mesh = single_disk_mesh(1.0, 0.5, 2.0, levels=0)
    space = FeSpace(mesh, 10)
    nu_max = 40
    q = boundary_fourier(space, nu_max)
    theta = np.arctan2(space.node_xy[: space.N_a, 1], space.node_xy[: space.N_a, 0])
    u = np.exp(np.sin(theta))  # smooth periodic test function
    c_plus = q @ u
    c_minus = np.conj(q) @ u
    total = np.abs(c_plus[0]) ** 2 + np.sum(np.abs(c_plus[1:]) ** 2 + np.abs(c_minus[1:]) ** 2)
    # Direct trace-norm oracle: int |u|^2 dtheta by dense trapezoid.
    tt = np.linspace(0.0, 2.0 * np.pi, 20001)
    ref = np.trapezoid(np.exp(np.sin(tt)) ** 2, tt)
    assert abs(total - ref) < 1e-6 * ref


def test_geometry_config_roundtrip():
    cfg = GeometryConfig(kind="dimer", a=1.0, R=0.25, s=0.25, eta_s=2.0, p=4, levels=0, nu_max=12)
    assert GeometryConfig.from_json(cfg.to_json()) == cfg
    with pytest.raises(ConfigError):
        GeometryConfig.from_json(json.dumps({"kind": "dimer", "bogus": 1}))
    with pytest.raises(ConfigError):
        GeometryConfig(kind="triangle")
    with pytest.raises(ConfigError):
        GeometryConfig(kind="single_disk", R=-1.0)


def test_resonator_inside_truncation_circle():
    cfg = GeometryConfig(kind="single_disk", a=2.0, R=1.0, d=1.5, eta_s=2.0, p=3)
    with pytest.raises(GeometryError):
        build_problem(cfg)


def test_empty_resonator_no_eigenvalues(sd_config_small):
    cfg = GeometryConfig(kind="empty", a=1.0, p=4, levels=1, nu_max=8)
    nep, _ = build_problem(cfg)
    mu = 3.0 - 0.5j
    pairs, _ = tiar_run(nep, mu=mu, m=40, seed=1)
    window = [p for p in pairs if abs(p.lam - mu) < 2.5]
    assert not any(p.backward_error <= 1e-9 for p in window)


def test_build_problem_single_disk(sd_config_small):
    nep, space = build_problem(sd_config_small)
    assert nep.N == space.N and nep.N_a == space.N_a
    assert nep.nu_max == sd_config_small.nu_max
    assert nep.a == sd_config_small.a
