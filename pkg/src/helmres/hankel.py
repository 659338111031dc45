"""Complex-argument Bessel and Hankel functions of integer order.

Point evaluations are delegated to the Amos routines wrapped by
``scipy.special``, which are accurate to near machine precision for the
orders (|nu| <= 130) and arguments (|z| <= 300) used by the resonance
solver.  On top of those we build the structured quantities the solver
needs: vectors of consecutive orders H_0, ..., H_{r-1} via the forward
three-term recurrence, and high-order derivative vectors via repeated
application of the tridiagonal recursion matrix B_r.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.special as sp

from helmres.errors import DomainError, RangeError

# Ranges in which the backend is validated by the Wronskian test suite.
MAX_ORDER = 200
MAX_ARG = 2000.0


def _check_range(nu: int, z: complex) -> None:
    if abs(nu) > MAX_ORDER or abs(z) > MAX_ARG:
        raise RangeError(f"order/argument out of supported range: nu={nu}, z={z}")


def bessel_j(nu: int, z: complex) -> complex:
    """Bessel function of the first kind J_nu(z) for integer nu, complex z."""
    _check_range(nu, z)
    v = complex(sp.jv(nu, complex(z)))
    if not np.isfinite(v):
        raise RangeError(f"J_nu overflow at nu={nu}, z={z}")
    return v


def bessel_y(nu: int, z: complex) -> complex:
    """Bessel function of the second kind Y_nu(z); z = 0 is a singularity."""
    if z == 0:
        raise DomainError("Y_nu has a logarithmic singularity at z = 0")
    _check_range(nu, z)
    v = complex(sp.yv(nu, complex(z)))
    if not np.isfinite(v):
        raise RangeError(f"Y_nu overflow at nu={nu}, z={z}")
    return v


def hankel1(nu: int, z: complex) -> complex:
    """Hankel function of the first kind H_nu(z) = J_nu(z) + i Y_nu(z)."""
    if z == 0:
        raise DomainError("H_nu has a logarithmic singularity at z = 0")
    _check_range(nu, z)
    v = complex(sp.hankel1(nu, complex(z)))
    if not np.isfinite(v):
        raise RangeError(f"H_nu overflow at nu={nu}, z={z}")
    return v


@dataclass(frozen=True)
class HankelVector:
    """Vector [H_0(z), H_1(z), ..., H_{r-1}(z)] of first-kind Hankel values."""

    order_count: int
    z: complex
    values: np.ndarray

    def negative_orders(self) -> np.ndarray:
        """Values for orders 0, -1, ..., 1-r using H_{-nu} = (-1)^nu H_nu."""
        signs = np.where(np.arange(self.order_count) % 2 == 0, 1.0, -1.0)
        return signs * self.values


def hankel_vector(r: int, z: complex) -> HankelVector:
    """H_0(z), ..., H_{r-1}(z) by one forward recurrence pass.

    The recurrence H_{nu+1} = (2 nu / z) H_nu - H_{nu-1} is stable in the
    forward direction for first-kind Hankel functions, which grow with nu.
    """
    if r < 1:
        raise ValueError("need at least one order")
    if z == 0:
        raise DomainError("H_nu has a logarithmic singularity at z = 0")
    _check_range(r - 1, z)
    z = complex(z)
    values = np.empty(r, dtype=complex)
    values[0] = sp.hankel1(0, z)
    if r > 1:
        values[1] = sp.hankel1(1, z)
        for nu in range(1, r - 1):
            values[nu + 1] = (2.0 * nu / z) * values[nu] - values[nu - 1]
    if not np.all(np.isfinite(values)):
        raise RangeError(f"Hankel vector overflow at r={r}, z={z}")
    return HankelVector(order_count=r, z=z, values=values)


def recursion_matrix(r: int) -> np.ndarray:
    """Tridiagonal matrix B_r mapping Hankel values to their derivatives.

    Row 0 encodes H_0' = -H_1; interior rows encode the recurrence
    H_nu' = (H_{nu-1} - H_{nu+1}) / 2.
    """
    B = np.zeros((r, r))
    if r > 1:
        B[0, 1] = -1.0
    for i in range(1, r):
        B[i, i - 1] = 0.5
        if i + 1 < r:
            B[i, i + 1] = -0.5
    return B


def apply_recursion(vec: np.ndarray) -> np.ndarray:
    """Matrix-vector product B_r @ vec without forming B_r."""
    r = vec.shape[0]
    out = np.zeros_like(vec)
    if r > 1:
        out[0] = -vec[1]
        out[1:] = 0.5 * vec[:-1]
        out[1:-1] -= 0.5 * vec[2:]
    return out


def hankel_derivative_vectors(r: int, k_max: int, a: float, z: complex) -> list[np.ndarray]:
    """Derivative vectors d^k/dz^k [H_0(az), ..., H_{r-1}(az)], k = 0..k_max.

    Uses the recursion-matrix identity: the k-th derivative vector equals
    a^k [I_r, 0] B^k applied to a Hankel vector of r + k_max orders, realized
    as k_max repeated matvecs.  Entry nu of the k-th truncated vector is
    exact because B is tridiagonal: each matvec corrupts only the trailing
    entry, so r + k_max leading orders suffice.
    """
    if r < 1 or k_max < 0:
        raise ValueError("need r >= 1 and k_max >= 0")
    if a <= 0:
        raise ValueError("scaling a must be positive")
    full = hankel_vector(r + k_max, a * z).values
    out = [full[:r].copy()]
    cur = full
    for _ in range(k_max):
        cur = a * apply_recursion(cur)
        out.append(cur[:r].copy())
    return out
