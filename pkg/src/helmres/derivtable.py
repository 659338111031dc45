"""High-order derivative tables of the DtN nonlinearities at a shift.

The DtN symbol for order nu is g_nu(lam) = lam H_nu'(a lam) / H_nu(a lam);
with pole cancellation it becomes
g~_nu(lam) = lam (lam - z_1)...(lam - z_p) H_nu'(a lam) / H_nu(a lam).
Both are quotient-times-polynomial functions whose Taylor coefficients at a
shift mu are computed with triangular Toeplitz matrices: the matrix function
of a transposed Jordan block J_mu^T is lower-triangular Toeplitz with first
column f^{(j)}(mu)/j!, products of functions are products of such matrices,
and the quotient becomes a triangular solve.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from helmres.errors import SingularDenominatorError
from helmres.hankel import hankel_derivative_vectors

#: Relative distance from the shift at which an unlisted Hankel zero aborts
#: the table build.
ZERO_GUARD = 1e-8


def factorials(n: int) -> np.ndarray:
    """[0!, 1!, ..., (n-1)!] as floats; finite for n <= 171."""
    out = np.ones(n)
    if n > 1:
        out[1:] = np.cumprod(np.arange(1.0, n))
    return out


def jordan_block(mu: complex, size: int) -> np.ndarray:
    """Upper bidiagonal Jordan block with eigenvalue mu."""
    J = np.diag(np.full(size, complex(mu)))
    for i in range(size - 1):
        J[i, i + 1] = 1.0
    return J


def toeplitz_of(derivs: np.ndarray) -> np.ndarray:
    """Lower-triangular Toeplitz matrix of a function from its derivatives.

    ``derivs[j]`` holds f^{(j)}(mu); entry (i, j) of the result is
    f^{(i-j)}(mu)/(i-j)!, the matrix function f(J_mu^T).
    """
    derivs = np.asarray(derivs, dtype=complex)
    n = derivs.shape[0]
    col = derivs / factorials(n)
    return sla.toeplitz(col, np.zeros(n, dtype=complex))


def taylor_coeffs_of_poly(coeffs_at_zero: np.ndarray, mu: complex, n: int) -> np.ndarray:
    """First n Taylor coefficients at mu of a polynomial given at the origin.

    ``coeffs_at_zero`` are ascending monomial coefficients; the result holds
    p^{(j)}(mu)/j! for j = 0..n-1.
    """
    c = np.zeros(n, dtype=complex)
    # Repeated application of lam = mu + t: start from the constant leading
    # coefficient and Horner in the shifted variable.
    poly = np.asarray(coeffs_at_zero, dtype=complex)
    shifted = np.zeros(1, dtype=complex)
    for a_k in poly[::-1]:
        # shifted(t) <- shifted(t) * (mu + t) + a_k
        new = np.zeros(shifted.shape[0] + 1, dtype=complex)
        new[: shifted.shape[0]] += mu * shifted
        new[1:] += shifted
        new[0] += a_k
        shifted = new
    m = min(n, shifted.shape[0])
    c[:m] = shifted[:m]
    return c


def cauchy_product(a: np.ndarray, b: np.ndarray, n: int | None = None) -> np.ndarray:
    """Truncated Cauchy product of two Taylor coefficient sequences."""
    full = np.convolve(a, b)
    if n is None:
        n = max(a.shape[0], b.shape[0])
    out = np.zeros(n, dtype=complex)
    m = min(n, full.shape[0])
    out[:m] = full[:m]
    return out


def pole_polynomial_coeffs(mu: complex, poles: list[complex], n: int, include_lambda: bool = True) -> np.ndarray:
    """Taylor coefficients at mu of p(lam) = lam * prod(lam - z_i).

    With ``include_lambda=False`` the leading factor lam is dropped.
    """
    c = np.zeros(n, dtype=complex)
    c[0] = 1.0
    if include_lambda:
        c[0] = mu
        if n > 1:
            c[1] = 1.0
    for z in poles:
        lin = np.zeros(min(n, 2), dtype=complex)
        lin[0] = mu - z
        if n > 1:
            lin[1] = 1.0
        c = cauchy_product(c, lin, n)
    return c


def quotient_derivatives(
    h1_derivs: np.ndarray,
    h2_derivs: np.ndarray,
    p_taylor: np.ndarray,
    k_max: int,
) -> np.ndarray:
    """Taylor coefficients at mu of g = (h1/h2) * p from raw derivatives.

    ``h1_derivs`` and ``h2_derivs`` hold the raw derivatives of the numerator
    and denominator at mu, ``p_taylor`` the Taylor coefficients of the
    polynomial factor at mu.  Returns the first k_max + 1 Taylor coefficients
    g^{(j)}(mu)/j!.  The denominator Toeplitz matrix is applied through a
    triangular solve; no inverse is formed.
    """
    if h2_derivs[0] == 0:
        raise SingularDenominatorError("denominator vanishes at the shift", location=None)
    n = k_max + 1
    H1 = toeplitz_of(np.asarray(h1_derivs)[:n])
    H2 = toeplitz_of(np.asarray(h2_derivs)[:n])
    q = np.zeros(n, dtype=complex)
    m = min(n, len(p_taylor))
    q[:m] = p_taylor[:m]
    y = sla.solve_triangular(H2, q, lower=True)
    return H1 @ y


@dataclass(frozen=True)
class DerivativeTable:
    """Taylor coefficients of the (possibly pole-cancelled) DtN terms at mu.

    ``coeffs[j, nu]`` holds g~_nu^{(j)}(mu)/j! for j = 0..k_max and
    nu = 0..nu_max.  The symmetry g~_{-nu} = g~_nu makes the table serve
    negative orders too.
    """

    mu: complex
    radius: float
    nu_max: int
    k_max: int
    poles: tuple[complex, ...]
    coeffs: np.ndarray = field(repr=False)

    def column(self, nu: int) -> np.ndarray:
        """Taylor coefficient column for order nu (negative nu allowed)."""
        return self.coeffs[:, abs(nu)]

    def raw_derivatives(self, nu: int) -> np.ndarray:
        """Raw derivatives g~_nu^{(j)}(mu), i.e. coefficients times j!."""
        return self.column(nu) * factorials(self.k_max + 1)


def build_table(
    mu: complex,
    a: float,
    nu_max: int,
    k_max: int,
    poles: list[complex] | tuple[complex, ...] = (),
) -> DerivativeTable:
    """Derivative table of g~_nu at mu for all orders 0..nu_max.

    One batch of recursion-matrix passes produces the derivatives of
    lam -> H_nu(a lam) for every order simultaneously; each order then costs
    a pair of triangular Toeplitz operations.  Listed poles enter through
    the polynomial factor p(lam) = lam * prod(lam - z_i); the quotient
    itself is untouched, which is what cancels the pole in the product.
    """
    poles = tuple(complex(z) for z in poles)
    n = k_max + 1
    # Derivatives of lam -> H_nu(a*lam): one extra derivative order feeds the
    # numerator (the derivative of the Hankel function), one extra Hankel
    # order guards the recursion-matrix truncation.
    derivs = hankel_derivative_vectors(nu_max + 1, k_max + 1, a, mu)
    # derivs[k][nu] = d^k/dlam^k H_nu(a lam) at lam = mu
    q = pole_polynomial_coeffs(mu, list(poles), n, include_lambda=True)
    coeffs = np.empty((n, nu_max + 1), dtype=complex)
    for nu in range(nu_max + 1):
        h2 = np.array([derivs[k][nu] for k in range(n)])
        if abs(h2[0]) <= ZERO_GUARD * max(abs(derivs[1][nu]) / a, 1.0):
            raise SingularDenominatorError(
                f"H_{nu}(a*mu) ~ 0 at mu={mu}: unlisted pole near the shift",
                nu=nu,
                location=mu,
            )
        # Numerator h1(lam) = H_nu'(a lam): its lam-derivatives are the next
        # derivative order of H_nu(a lam), divided by the chain-rule factor a.
        h1 = np.array([derivs[k + 1][nu] for k in range(n)]) / a
        coeffs[:, nu] = quotient_derivatives(h1, h2, q, k_max)
    return DerivativeTable(
        mu=complex(mu), radius=float(a), nu_max=nu_max, k_max=k_max, poles=poles, coeffs=coeffs
    )
