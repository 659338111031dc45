"""Resonance computations for 2D Helmholtz scattering problems.

Assembles the nonlinear eigenvalue problem T(lam) = A - lam^2 M - G(lam)
arising from a finite element discretization of the exterior Helmholtz
problem with a Dirichlet-to-Neumann boundary operator on a circle, and
solves it with a tensor infinite Arnoldi iteration with optional pole
cancellation.
"""

from helmres.hankel import bessel_j, bessel_y, hankel1, hankel_vector, hankel_derivative_vectors
from helmres.derivtable import DerivativeTable, build_table
from helmres.nep import DtnNep, find_poles
from helmres.tiar import RitzPair, tiar_run
from helmres.reference import reference_table, newton_resonance

__all__ = [
    "bessel_j",
    "bessel_y",
    "hankel1",
    "hankel_vector",
    "hankel_derivative_vectors",
    "DerivativeTable",
    "build_table",
    "DtnNep",
    "find_poles",
    "RitzPair",
    "tiar_run",
    "reference_table",
    "newton_resonance",
]
