"""Shared fixtures and independent numerical oracles for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from helmres.fem import FeSpace, GeometryConfig, assemble, boundary_fourier, single_disk_mesh
from helmres.nep import DtnNep


# -- oracles ------------------------------------------------------------


def maclaurin_j0(z: complex, terms: int = 30) -> complex:
    """J_0 by its Maclaurin series (independent of the library code)."""
    total = 0.0 + 0j
    term = 1.0 + 0j
    for k in range(terms):
        if k > 0:
            term *= -(z * z) / (4.0 * k * k)
        total += term
    return total


def contour_derivative(f, z0: complex, k: int, radius: float = 0.05, n: int = 256) -> complex:
    """k-th derivative of f at z0 by the trapezoidal Cauchy integral."""
    phi = 2.0 * np.pi * np.arange(n) / n
    zs = z0 + radius * np.exp(1j * phi)
    vals = np.array([f(z) for z in zs])
    coeff = np.fft.fft(vals)[k] / n / radius**k
    from math import factorial

    return coeff * factorial(k)


def contour_taylor_scaled(f, z0: complex, k_max: int, radius: float, n: int = 512) -> np.ndarray:
    """Scaled Taylor coefficients c_j * radius^j of f at z0 (well conditioned).

    Comparing scaled coefficients avoids the 1/radius^j amplification of the
    raw-coefficient recovery for large j.
    """
    phi = 2.0 * np.pi * np.arange(n) / n
    zs = z0 + radius * np.exp(1j * phi)
    vals = np.array([f(z) for z in zs])
    return np.fft.fft(vals)[: k_max + 1] / n


def winding_number(f, region: tuple[float, float, float, float], n: int = 2048) -> int:
    """Zero count of analytic f inside a rectangle via the argument principle."""
    x0, x1, y0, y1 = region
    corners = [x0 + 1j * y0, x1 + 1j * y0, x1 + 1j * y1, x0 + 1j * y1, x0 + 1j * y0]
    phases = []
    for a, b in zip(corners[:-1], corners[1:]):
        t = np.linspace(0.0, 1.0, n // 4, endpoint=False)
        for z in a + t * (b - a):
            phases.append(np.angle(f(z)))
    phases = np.unwrap(np.array(phases + [phases[0]]))
    return int(np.rint((phases[-1] - phases[0]) / (2.0 * np.pi)))


# -- shared small problems ---------------------------------------------


@pytest.fixture(scope="session")
def sd_small():
    """Small single-disk problem (R=1, d=0.5, eta_s=2, a=2) at p=3."""
    mesh = single_disk_mesh(1.0, 0.5, 2.0, levels=0)
    space = FeSpace(mesh, 3)
    A, M = assemble(space, {1: 4.0})
    q = boundary_fourier(space, 8)
    return DtnNep(A, M, q, 2.0, 8), space


@pytest.fixture(scope="session")
def toy_1x1():
    """1x1 problem T(lam) = 1 - lam^2 (q = 0 disables the DtN part)."""
    import scipy.sparse as sps

    A = sps.csr_matrix(np.array([[1.0]]))
    M = sps.csr_matrix(np.array([[1.0]]))
    q = np.zeros((1, 1), dtype=complex)
    return DtnNep(A, M, q, 1.0, 0)


@pytest.fixture(scope="session")
def sd_config_small():
    return GeometryConfig(
        kind="single_disk", a=2.0, R=1.0, d=0.5, eta_s=2.0, p=3, levels=0, nu_max=8
    )
