"""Tensor infinite Arnoldi iteration for the DtN eigenvalue problem.

The infinite Arnoldi method is shift-invert Arnoldi on the companion
linearization of the Taylor expansion of T at a shift mu: the stacked
Krylov vector with blocks (y_0, ..., y_{k-1}) maps to (x_0, ..., x_k) with

    x_i = y_{i-1}/i,   x_0 = -T(mu)^{-1} sum_j A_j sum_i x_i f_j^{(i)}(mu).

Ritz values theta of the Hessenberg matrix give eigenvalue approximations
lam = mu + 1/theta.  The tensor variant stores the basis as one orthonormal
N x (k+1) matrix Z plus a coefficient tensor, so the stacked vectors are
never formed; the expansion is mathematically identical to the explicit
iteration (``iar_explicit`` below, kept as a validation reference).

With pole cancellation the iteration runs on T~ = prod(lam - z_i) T; Ritz
values that coincide with a cancelled pole are spurious and are filtered,
and all reported backward errors are computed from the original T.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from helmres.derivtable import build_table, factorials
from helmres.errors import ConvergenceError
from helmres.nep import DtnNep, PoleSet, ShiftedFactorization, SmfTerms, find_poles

#: Ritz values closer than this to a cancelled pole are discarded.
POLE_FILTER = 1e-6
#: Lucky-breakdown threshold on the orthogonalized stacked-vector norm.
BREAKDOWN_TOL = 1e-14


@dataclass
class RitzPair:
    """Eigenpair approximation extracted from the Arnoldi Hessenberg matrix."""

    lam: complex
    vector: np.ndarray
    backward_error: float
    converged: bool
    theta: complex


@dataclass
class TiarState:
    """Compressed Krylov data after k expansion steps."""

    mu: complex
    k: int
    Z: np.ndarray          # N x (k+1), orthonormal columns (zcols used)
    zcols: int
    coeff: np.ndarray      # (m+1, m+1, m+1); coeff[l, i, j] = Z-col l, block i, vec j
    H: np.ndarray          # (m+1, m) Hessenberg
    scale: float = 1.0     # Taylor variable scaling: tau = (lam - mu)/scale
    breakdown: bool = False
    history: list = field(default_factory=list)


def _start_vector(n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


def tiar_init(smf: SmfTerms, m: int, seed: int = 0, scale: float = 1.0) -> TiarState:
    """Allocate the compressed basis for at most m expansion steps."""
    n = smf.nep.N
    if smf.table.k_max < m:
        raise ValueError("derivative table depth below the iteration budget")
    Z = np.zeros((n, m + 1), dtype=complex)
    Z[:, 0] = _start_vector(n, seed)
    coeff = np.zeros((m + 1, m + 1, m + 1), dtype=complex)
    coeff[0, 0, 0] = 1.0
    H = np.zeros((m + 1, m), dtype=complex)
    return TiarState(mu=smf.mu, k=0, Z=Z, zcols=1, coeff=coeff, H=H, scale=float(scale))


def _derivative_block(
    smf: SmfTerms, k: int, scale: float = 1.0
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Scaled raw derivatives scale^i f_j^{(i)}(mu), i = 1..k, for all terms.

    Returns (dA, dM, Ddtn) where dA/dM are length-k vectors for the constant
    and quadratic terms and Ddtn is (k, nu_max+1) for the DtN terms.  The
    scale implements the substitution lam = mu + scale*tau, which leaves the
    Krylov space invariant but balances the coefficient magnitudes so that
    rounding noise is not amplified by steep Taylor growth.
    """
    fact = factorials(k + 1)[1:] * np.power(float(scale), np.arange(1, k + 1))
    dA = smf.coeff_const[1 : k + 1] * fact
    dM = smf.coeff_quad[1 : k + 1] * fact
    Ddtn = smf.table.coeffs[1 : k + 1, : smf.nep.nu_max + 1] * fact[:, None]
    return dA, dM, Ddtn


def tiar_expand(
    state: TiarState,
    smf: SmfTerms,
    fact: ShiftedFactorization,
    use_locality: bool = True,
) -> TiarState:
    """One infinite-Arnoldi step on the compressed representation."""
    if state.breakdown:
        return state
    nep = smf.nep
    k = state.k + 1          # number of blocks fed into the new vector
    zc = state.zcols
    # Coefficients of the blocks x_1..x_k: shift of the last vector's blocks.
    y = state.coeff[:zc, :k, k - 1]                      # (zc, k): blocks 0..k-1
    x_coeff = y / np.arange(1.0, k + 1)                  # column i-1 holds x_i
    dA, dM, Ddtn = _derivative_block(smf, k, state.scale)
    wA = x_coeff @ dA                                    # (zc,)
    wM = x_coeff @ dM
    Zc = state.Z[:, :zc]
    rhs = nep.A @ (Zc @ wA) + nep.M @ (Zc @ wM)
    # DtN terms act only on boundary rows of the basis.
    Wdtn = x_coeff @ Ddtn                                # (zc, nu_max+1)
    if use_locality:
        Pb = Zc[: nep.N_a] @ Wdtn                        # (N_a, nu_max+1)
    else:
        Pb = (Zc @ Wdtn)[: nep.N_a]
    t_plus = np.einsum("nj,jn->n", nep.q, Pb)            # q^nu . s_nu
    t_minus = np.einsum("nj,jn->n", np.conj(nep.q), Pb)
    dtn = np.conj(nep.q).T @ t_plus
    if nep.nu_max >= 1:
        dtn += nep.q[1:].T @ t_minus[1:]
    rhs[: nep.N_a] -= nep.a * dtn
    x0 = -fact.solve(rhs)
    if smf.poles:
        x0 = x0 / smf.pole_poly(state.mu)
    # Orthogonalize x0 against Z (modified Gram-Schmidt, one extra pass).
    t = Zc.conj().T @ x0
    x0 = x0 - Zc @ t
    t2 = Zc.conj().T @ x0
    x0 = x0 - Zc @ t2
    t += t2
    beta0 = np.linalg.norm(x0)
    new_col = beta0 > BREAKDOWN_TOL
    if new_col:
        state.Z[:, zc] = x0 / beta0
    zc_new = zc + 1 if new_col else zc
    # Candidate coefficient matrix of the stacked vector (blocks 0..k).
    cand = np.zeros((zc_new, k + 1), dtype=complex)
    cand[:zc, 0] = t
    if new_col:
        cand[zc, 0] = beta0
    cand[:zc, 1:] = x_coeff
    # Orthogonalize against previous stacked vectors (Frobenius metric).
    prev = state.coeff[:zc_new, : k + 1, :k]             # (zc_new, k+1, k)
    h = np.einsum("lij,li->j", prev.conj(), cand)
    cand = cand - np.einsum("lij,j->li", prev, h)
    h2 = np.einsum("lij,li->j", prev.conj(), cand)
    cand = cand - np.einsum("lij,j->li", prev, h2)
    h += h2
    beta = np.linalg.norm(cand)
    state.H[:k, k - 1] = h
    state.H[k, k - 1] = beta
    if beta <= BREAKDOWN_TOL:
        state.breakdown = True
        state.k = k
        return state
    state.coeff[:zc_new, : k + 1, k] = cand / beta
    state.zcols = zc_new
    state.k = k
    return state


def ritz_pairs(
    state: TiarState,
    nep: DtnNep,
    poles: tuple[complex, ...] = (),
    tol: float = 1e-9,
    max_pairs: int | None = None,
) -> list[RitzPair]:
    """Ritz extraction: Hessenberg eigenvalues mapped by lam = mu + 1/theta.

    Backward errors are always computed from the original T, and Ritz values
    within the pole filter distance of a cancelled pole are dropped.
    """
    k = state.k
    if k < 1:
        return []
    Hk = state.H[:k, :k]
    theta, S = np.linalg.eig(Hk)
    order = np.argsort(-np.abs(theta))
    if max_pairs is not None:
        order = order[:max_pairs]
    out: list[RitzPair] = []
    lead = state.coeff[: state.zcols, 0, :k]             # block-0 coefficients
    for j in order:
        th = theta[j]
        if th == 0:
            continue
        lam = state.mu + state.scale / th
        if any(abs(lam - z) < POLE_FILTER for z in poles):
            continue
        v = state.Z[:, : state.zcols] @ (lead @ S[:, j])
        nv = np.linalg.norm(v)
        if nv == 0:
            continue
        v = v / nv
        try:
            be = nep.backward_error(lam, v)
        except Exception:
            continue
        out.append(RitzPair(lam=lam, vector=v, backward_error=be, converged=be <= tol, theta=th))
    out.sort(key=lambda p: p.backward_error)
    return out


def tiar_run(
    nep: DtnNep,
    mu: complex,
    m: int,
    cancel: bool = False,
    pole_region: tuple[float, float, float, float] | None = None,
    seed: int = 0,
    tol: float = 1e-9,
    scale: float = 1.0,
    history: bool = False,
    history_pairs: int = 8,
) -> tuple[list[RitzPair], TiarState]:
    """Run m restart-free expansion steps and extract converged Ritz pairs.

    With ``cancel`` the poles of the DtN symbol inside ``pole_region``
    (default: a box of half-width 1.5 around mu reaching the real axis) are
    cancelled before iterating.  Returns the sorted pairs and the final
    state; per-iteration (iteration, lam, backward error) triples are
    recorded on the state when ``history`` is set.
    """
    poles: tuple[complex, ...] = ()
    if cancel:
        if pole_region is None:
            r = 1.5
            pole_region = (mu.real - r, mu.real + r, mu.imag - r, 0.0)
        pole_set: PoleSet = find_poles(nep.a, nep.nu_max, pole_region)
        poles = tuple(p.z for p in pole_set.poles)
    table = build_table(mu, nep.a, nep.nu_max, m + 1, list(poles))
    smf = SmfTerms(nep, table)
    fact = ShiftedFactorization(nep, mu, known_poles=poles, cancel=cancel)
    state = tiar_init(smf, m, seed=seed, scale=scale)
    for _ in range(m):
        state = tiar_expand(state, smf, fact)
        if history:
            pairs = ritz_pairs(state, nep, poles=poles, tol=tol, max_pairs=history_pairs)
            state.history.append([(state.k, p.lam, p.backward_error) for p in pairs])
        if state.breakdown:
            break
    pairs = ritz_pairs(state, nep, poles=poles, tol=tol)
    if not pairs:
        raise ConvergenceError(
            f"no Ritz pair extracted after {state.k} steps at mu={mu}; "
            "increase the iteration budget or move the shift"
        )
    return pairs, state


# -- explicit-basis reference iteration (validation only) ---------------


def iar_explicit(
    smf: SmfTerms, fact: ShiftedFactorization, m: int, seed: int = 0, scale: float = 1.0
):
    """Plain infinite Arnoldi with the stacked basis stored explicitly.

    Memory O(N m^2); used to validate the tensor-compressed iteration.
    Returns (Hessenberg, list of stacked basis vectors as (m+1, N) arrays).
    """
    nep = smf.nep
    n = nep.N
    v0 = _start_vector(n, seed)
    basis = [np.zeros((m + 1, n), dtype=complex)]
    basis[0][0] = v0
    H = np.zeros((m + 1, m), dtype=complex)
    for k in range(1, m + 1):
        y = basis[k - 1]
        x = np.zeros((m + 1, n), dtype=complex)
        for i in range(1, k + 1):
            x[i] = y[i - 1] / i
        dA, dM, Ddtn = _derivative_block(smf, k, scale)
        rhs = np.zeros(n, dtype=complex)
        sA = np.zeros(n, dtype=complex)
        sM = np.zeros(n, dtype=complex)
        sdtn = np.zeros((nep.N_a, nep.nu_max + 1), dtype=complex)
        for i in range(1, k + 1):
            sA += dA[i - 1] * x[i]
            sM += dM[i - 1] * x[i]
            sdtn += np.outer(x[i][: nep.N_a], Ddtn[i - 1])
        rhs = nep.A @ sA + nep.M @ sM
        t_plus = np.einsum("nj,jn->n", nep.q, sdtn)
        t_minus = np.einsum("nj,jn->n", np.conj(nep.q), sdtn)
        dtn = np.conj(nep.q).T @ t_plus
        if nep.nu_max >= 1:
            dtn += nep.q[1:].T @ t_minus[1:]
        rhs[: nep.N_a] -= nep.a * dtn
        x[0] = -fact.solve(rhs)
        if smf.poles:
            x[0] = x[0] / smf.pole_poly(smf.mu)
        h = np.zeros(k, dtype=complex)
        for j in range(k):
            hj = np.vdot(basis[j], x)
            x -= hj * basis[j]
            h[j] += hj
        for j in range(k):
            hj = np.vdot(basis[j], x)
            x -= hj * basis[j]
            h[j] += hj
        beta = np.linalg.norm(x)
        H[:k, k - 1] = h
        H[k, k - 1] = beta
        if beta <= BREAKDOWN_TOL:
            break
        basis.append(x / beta)
    return H, basis
