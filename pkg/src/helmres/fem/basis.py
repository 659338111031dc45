"""1D nodal basis utilities: Gauss-Lobatto nodes, barycentric Lagrange
evaluation and differentiation, Gauss quadrature."""

from __future__ import annotations

import numpy as np


def gauss_lobatto(p: int) -> np.ndarray:
    """The p+1 Gauss-Lobatto points on [-1, 1] (roots of (1-x^2) P_p')."""
    if p < 1:
        raise ValueError("degree must be >= 1")
    if p == 1:
        return np.array([-1.0, 1.0])
    inner = np.polynomial.legendre.Legendre.basis(p).deriv().roots()
    pts = np.concatenate(([-1.0], np.real(inner), [1.0]))
    # Symmetrize against rootfinder noise.
    return 0.5 * (pts - pts[::-1])


def gauss_points(n: int) -> tuple[np.ndarray, np.ndarray]:
    """n-point Gauss-Legendre rule on [-1, 1] (points, weights)."""
    return np.polynomial.legendre.leggauss(n)


def barycentric_weights(nodes: np.ndarray) -> np.ndarray:
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    return 1.0 / np.prod(diff, axis=1)


def lagrange_matrix(nodes: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Values L[a, i] of the i-th Lagrange cardinal function at x[a]."""
    w = barycentric_weights(nodes)
    x = np.asarray(x, dtype=float)
    d = x[:, None] - nodes[None, :]
    exact = np.isclose(d, 0.0, atol=1e-14)
    d_safe = np.where(exact, 1.0, d)
    terms = w[None, :] / d_safe
    L = terms / terms.sum(axis=1, keepdims=True)
    hit = exact.any(axis=1)
    if np.any(hit):
        L[hit] = 0.0
        rows, cols = np.nonzero(exact)
        L[rows, cols] = 1.0
    return L


def differentiation_matrix(nodes: np.ndarray) -> np.ndarray:
    """D[a, i] = derivative of cardinal function i at node a (barycentric)."""
    n = nodes.shape[0]
    w = barycentric_weights(nodes)
    D = np.zeros((n, n))
    for a in range(n):
        for i in range(n):
            if a != i:
                D[a, i] = (w[i] / w[a]) / (nodes[a] - nodes[i])
        D[a, a] = -np.sum(D[a])
    return D


def lagrange_derivative_matrix(nodes: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Derivatives of the cardinal functions at arbitrary points x.

    Computed as the Lagrange interpolant of the nodal derivative matrix:
    p_i'(x) = sum_b L_b(x) (D @ e_i)_b is exact because p_i' has degree p-1.
    """
    return lagrange_matrix(nodes, x) @ differentiation_matrix(nodes)
