"""The DtN nonlinear eigenvalue problem T(lam) = A - lam^2 M - G(lam).

A and M are sparse symmetric finite element matrices; G(lam) collects the
rank-one DtN boundary terms a g_nu(lam) Q^nu with Q^nu = conj(q^nu) (q^nu)^T
and g_nu(lam) = lam H_nu'(a lam)/H_nu(a lam).  The +-nu pairs are combined
through q^{-nu} = conj(q^nu) and g_{-nu} = g_nu; only nu >= 0 is stored.
Boundary degrees of freedom occupy the leading N_a indices, so the DtN block
is a dense upper-left block of size N_a x N_a.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sps
import scipy.sparse.linalg as spla
import scipy.special as sp

from helmres.derivtable import DerivativeTable, pole_polynomial_coeffs
from helmres.errors import FactorizationError, PoleEvaluationError
from helmres.hankel import hankel_vector

#: factorize() refuses shifts this close to a known pole unless cancelling.
POLE_GUARD = 1e-6
#: Relative Hankel smallness that marks an evaluation point as "at a pole".
POLE_EVAL_TOL = 1e-12


class DtnNep:
    """Assembled matrix family (A, M, {q^nu}, a, nu_max) defining T(lam)."""

    def __init__(self, A, M, q_boundary, a, nu_max):
        self.A = sps.csr_matrix(A)
        self.M = sps.csr_matrix(M)
        self.q = np.asarray(q_boundary, dtype=complex)
        if self.q.shape[0] != nu_max + 1:
            raise ValueError("boundary vector block must have nu_max + 1 rows")
        self.a = float(a)
        self.nu_max = int(nu_max)
        self.N = self.A.shape[0]
        self.N_a = self.q.shape[1]
        self._norm_cache: dict[str, float] = {}

    def with_nu_max(self, nu_max: int) -> "DtnNep":
        """Same problem truncated to a smaller number of DtN terms."""
        if nu_max > self.nu_max:
            raise ValueError("cannot extend beyond the assembled nu_max")
        return DtnNep(self.A, self.M, self.q[: nu_max + 1], self.a, nu_max)

    # -- DtN symbol -----------------------------------------------------

    def hankel_ratios(self, lam: complex, check: bool = True) -> np.ndarray:
        """g_nu(lam) = lam H_nu'(a lam)/H_nu(a lam) for nu = 0..nu_max."""
        hv = hankel_vector(self.nu_max + 2, self.a * lam).values
        Hp = np.empty(self.nu_max + 1, dtype=complex)
        Hp[0] = -hv[1]
        if self.nu_max >= 1:
            # H_{nu-1} - H_{nu+1} over 2; H_{-1} never needed beyond nu=0
            Hp[1:] = 0.5 * (hv[: self.nu_max] - hv[2 : self.nu_max + 2])
        H = hv[: self.nu_max + 1]
        if check:
            bad = np.abs(H) < POLE_EVAL_TOL * np.abs(Hp)
            if np.any(bad):
                nu = int(np.argmax(bad))
                raise PoleEvaluationError(
                    f"lam={lam} is a pole of the DtN symbol (H_{nu}(a lam) ~ 0)", nu=nu
                )
        return lam * Hp / H

    def boundary_apply(self, g: np.ndarray, u_b: np.ndarray) -> np.ndarray:
        """G(lam) v restricted to boundary indices, for given per-order symbols.

        ``g[nu]`` multiplies the combined +-nu rank-one pair.  Cost
        O(nu_max * N_a).
        """
        t_plus = self.q @ u_b          # q^nu . u
        t_minus = np.conj(self.q) @ u_b
        out = np.conj(self.q).T @ (g * t_plus)
        if self.nu_max >= 1:
            out += self.q[1:].T @ (g[1:] * t_minus[1:])
        return self.a * out

    def apply_T(self, lam: complex, v: np.ndarray) -> np.ndarray:
        """T(lam) v = A v - lam^2 M v - G(lam) v."""
        v = np.asarray(v, dtype=complex)
        g = self.hankel_ratios(lam)
        out = self.A @ v - lam**2 * (self.M @ v)
        out[: self.N_a] -= self.boundary_apply(g, v[: self.N_a])
        return out

    def boundary_matrix(self, g: np.ndarray) -> np.ndarray:
        """Dense N_a x N_a DtN block for given per-order symbols."""
        D = np.conj(self.q).T @ (g[:, None] * self.q)
        if self.nu_max >= 1:
            D += self.q[1:].T @ (g[1:, None] * np.conj(self.q[1:]))
        return self.a * D

    def assemble_T(self, lam: complex) -> sps.csc_matrix:
        """Sparse T(lam) with the dense boundary block absorbed."""
        g = self.hankel_ratios(lam)
        D = self.boundary_matrix(g)
        T = (self.A - lam**2 * self.M).tocoo().astype(complex)
        rows, cols = np.meshgrid(np.arange(self.N_a), np.arange(self.N_a), indexing="ij")
        Dcoo = sps.coo_matrix((-D.ravel(), (rows.ravel(), cols.ravel())), shape=T.shape)
        return (T + Dcoo).tocsc()

    # -- norms and backward error --------------------------------------

    def _norm2(self, key: str) -> float:
        if key not in self._norm_cache:
            mat = self.A if key == "A" else self.M
            rng = np.random.default_rng(1234)
            x = rng.standard_normal(self.N)
            x /= np.linalg.norm(x)
            est = 0.0
            for _ in range(30):
                y = mat @ x
                est = np.linalg.norm(y)
                if est == 0.0:
                    break
                x = y / est
            self._norm_cache[key] = float(est)
        return self._norm_cache[key]

    def backward_error_scale(self, lam: complex) -> float:
        """alpha(lam) = ||A|| + |lam|^2 ||M|| + sum_nu |g_nu(lam)| a ||Q^nu||."""
        hv = hankel_vector(self.nu_max + 2, self.a * lam).values
        Hp = np.empty(self.nu_max + 1, dtype=complex)
        Hp[0] = -hv[1]
        if self.nu_max >= 1:
            Hp[1:] = 0.5 * (hv[: self.nu_max] - hv[2 : self.nu_max + 2])
        ratios = np.abs(lam) * self.a * np.abs(Hp) / np.abs(hv[: self.nu_max + 1])
        qnorms = np.sum(np.abs(self.q) ** 2, axis=1)  # ||Q^nu|| = ||q^nu||^2
        weights = np.full(self.nu_max + 1, 2.0)
        weights[0] = 1.0
        return self._norm2("A") + abs(lam) ** 2 * self._norm2("M") + float(
            np.sum(weights * ratios * qnorms)
        )

    def backward_error(self, lam: complex, v: np.ndarray) -> float:
        """||T(lam) v|| / alpha(lam) for a unit vector v."""
        r = self.apply_T(lam, v)
        return float(np.linalg.norm(r) / self.backward_error_scale(lam))


class ShiftedFactorization:
    """LU factorization of T(mu) supporting repeated refined solves."""

    def __init__(self, nep: DtnNep, mu: complex, known_poles=(), cancel: bool = False):
        self.mu = complex(mu)
        self.nep = nep
        for z in known_poles:
            if abs(self.mu - complex(z)) < POLE_GUARD and not cancel:
                raise FactorizationError(
                    f"shift mu={mu} within {POLE_GUARD} of pole {z}; enable cancellation"
                )
        try:
            self.T = nep.assemble_T(self.mu)
        except PoleEvaluationError as exc:
            raise FactorizationError(f"T(mu) evaluation failed at mu={mu}: {exc}") from exc
        try:
            self.lu = spla.splu(self.T)
        except RuntimeError as exc:
            raise FactorizationError(f"T(mu) numerically singular at mu={mu}: {exc}") from exc

    def solve(self, b: np.ndarray) -> np.ndarray:
        """Solve T(mu) x = b with iterative refinement to 1e-10 relative."""
        b = np.asarray(b, dtype=complex)
        x = self.lu.solve(b)
        nb = np.linalg.norm(b)
        if nb == 0.0:
            return x
        for _ in range(3):
            r = b - self.T @ x
            if np.linalg.norm(r) <= 1e-10 * nb:
                break
            x = x + self.lu.solve(r)
        return x


# -- pole location ------------------------------------------------------


@dataclass(frozen=True)
class PoleRecord:
    z: complex
    nu: int
    residual: float


@dataclass(frozen=True)
class PoleSet:
    """Polished zeros of H_nu(a lam) inside a search region."""

    a: float
    poles: tuple[PoleRecord, ...]

    def locations(self) -> np.ndarray:
        return np.array([p.z for p in self.poles])

    def __len__(self) -> int:
        return len(self.poles)


def _newton_polish(nu: int, a: float, z0: complex, max_steps: int = 50) -> complex | None:
    z = complex(z0)
    for _ in range(max_steps):
        hv = hankel_vector(nu + 2, a * z).values
        H = hv[nu]
        Hp = -hv[1] if nu == 0 else 0.5 * (hv[nu - 1] - hv[nu + 1])
        step = H / (a * Hp)
        z = z - step
        if abs(step) <= 1e-14 * max(abs(z), 1.0):
            return z
    return None


def find_poles(a: float, nu_max: int, region: tuple[float, float, float, float]) -> PoleSet:
    """All zeros of H_nu(lam a), |nu| <= nu_max, inside a rectangle.

    ``region`` is (re_min, re_max, im_min, im_max).  The right-half lower
    half-plane is searched: H^(1) has no zeros for Im z >= 0, and the
    branch of H on the negative real axis is left undefined, so the region
    is clipped to Re > 0, Im < 0.  Per order: a coarse grid scan of the
    phase winding per grid cell, then Newton polishing.
    """
    re_min, re_max, im_min, im_max = region
    re_min = max(re_min, 1e-9)
    im_max = min(im_max, -1e-12)
    found: list[PoleRecord] = []
    if re_max <= re_min or im_max <= im_min:
        return PoleSet(a=a, poles=())
    # Phase varies like exp(i a z): keep the grid step below half a period.
    step = min(0.1, 1.0 / a, (re_max - re_min) / 8, (im_max - im_min) / 8)
    xs = np.arange(re_min, re_max + step, step)
    ys = np.arange(im_min, im_max + step, step)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    Z = X + 1j * Y
    for nu in range(nu_max + 1):
        H = sp.hankel1(nu, a * Z)
        ph = np.angle(H)
        # winding number of each grid cell from wrapped phase differences
        def d(p, q):
            return np.mod(q - p + np.pi, 2 * np.pi) - np.pi

        w = (
            d(ph[:-1, :-1], ph[1:, :-1])
            + d(ph[1:, :-1], ph[1:, 1:])
            + d(ph[1:, 1:], ph[:-1, 1:])
            + d(ph[:-1, 1:], ph[:-1, :-1])
        )
        ii, jj = np.nonzero(np.abs(w) > np.pi)
        for i, j in zip(ii, jj):
            seed = Z[i, j] + 0.5 * step * (1 + 1j)
            z = _newton_polish(nu, a, seed)
            if z is None:
                continue
            if not (re_min - step <= z.real <= re_max + step and im_min - step <= z.imag <= im_max + step):
                continue
            if z.real <= 0 or z.imag >= 0:
                continue
            hv = hankel_vector(nu + 2, a * z).values
            Hp = -hv[1] if nu == 0 else 0.5 * (hv[nu - 1] - hv[nu + 1])
            resid = abs(hv[nu])
            if resid > 1e-12 * abs(Hp):
                continue
            if any(p.nu == nu and abs(p.z - z) < 1e-9 for p in found):
                continue
            found.append(PoleRecord(z=z, nu=nu, residual=resid))
    found.sort(key=lambda p: (p.z.real, p.z.imag))
    return PoleSet(a=a, poles=tuple(found))


# -- pole-cancelled split matrix-function form -------------------------


class SmfTerms:
    """Split matrix-function decomposition of T~(lam) = prod(lam - z_i) T(lam).

    Holds the Taylor coefficient sequences at the table shift for the
    constant term (f~_1 = P), the quadratic term (f~_2 = -lam^2 P) and the
    DtN terms (from the derivative table), where P(lam) = prod(lam - z_i).
    With an empty pole list this is the plain SMF form of T.
    """

    def __init__(self, nep: DtnNep, table: DerivativeTable):
        if table.nu_max < nep.nu_max:
            raise ValueError("derivative table truncated below the problem's nu_max")
        if abs(table.radius - nep.a) > 1e-12:
            raise ValueError("derivative table built for a different DtN radius")
        self.nep = nep
        self.table = table
        self.mu = table.mu
        self.poles = table.poles
        n = table.k_max + 1
        self.coeff_const = pole_polynomial_coeffs(self.mu, list(self.poles), n, include_lambda=False)
        quad = np.zeros(n, dtype=complex)
        quad[0] = -self.mu**2
        if n > 1:
            quad[1] = -2 * self.mu
        if n > 2:
            quad[2] = -1.0
        from helmres.derivtable import cauchy_product

        self.coeff_quad = cauchy_product(self.coeff_const, quad, n)

    def pole_poly(self, lam: complex) -> complex:
        out = 1.0 + 0j
        for z in self.poles:
            out *= lam - z
        return out

    def cancelled_symbols(self, lam: complex) -> np.ndarray:
        """g~_nu(lam) for nu = 0..nu_max, finite at the cancelled poles.

        At a listed pole the removable singularity is evaluated through the
        deflated limit (lam - z_i)/H_nu(a lam) -> 1/(a H_nu'(a z_i)).
        """
        nep = self.nep
        hv = hankel_vector(nep.nu_max + 2, nep.a * lam).values
        Hp = np.empty(nep.nu_max + 1, dtype=complex)
        Hp[0] = -hv[1]
        if nep.nu_max >= 1:
            Hp[1:] = 0.5 * (hv[: nep.nu_max] - hv[2 : nep.nu_max + 2])
        H = hv[: nep.nu_max + 1]
        out = np.empty(nep.nu_max + 1, dtype=complex)
        for nu in range(nep.nu_max + 1):
            near = [z for z in self.poles if abs(lam - z) < 1e-8]
            if near and abs(H[nu]) < 1e-6 * abs(Hp[nu]):
                z_i = min(near, key=lambda z: abs(lam - z))
                rest = lam
                for z in self.poles:
                    if z is not z_i:
                        rest *= lam - z
                # (lam - z_i) H'(a lam)/H(a lam) ~ 1/a near the zero of H
                out[nu] = rest / nep.a
            else:
                out[nu] = self.pole_poly(lam) * lam * Hp[nu] / H[nu]
        return out

    def apply(self, lam: complex, v: np.ndarray) -> np.ndarray:
        """T~(lam) v, valid also at the cancelled poles themselves."""
        v = np.asarray(v, dtype=complex)
        nep = self.nep
        P = self.pole_poly(lam)
        out = P * (nep.A @ v - lam**2 * (nep.M @ v))
        out[: nep.N_a] -= nep.boundary_apply(self.cancelled_symbols(lam), v[: nep.N_a])
        return out


def smf_terms(nep: DtnNep, table: DerivativeTable) -> SmfTerms:
    """SMF decomposition of the (possibly pole-cancelled) problem."""
    return SmfTerms(nep, table)


# -- on-disk matrix-family bundle --------------------------------------

BUNDLE_FORMAT = 1


def save_problem(nep: DtnNep, path: str) -> None:
    """Write the matrix family to a .npz bundle for solver-only use.

    Keys: format, N, N_a, a, nu_max; CSR triplets A_data/A_indices/A_indptr
    and M_*; the dense boundary block q (nu_max+1, N_a).
    """
    A = nep.A.tocsr()
    M = nep.M.tocsr()
    np.savez_compressed(
        path,
        format=BUNDLE_FORMAT,
        N=nep.N,
        N_a=nep.N_a,
        a=nep.a,
        nu_max=nep.nu_max,
        A_data=A.data,
        A_indices=A.indices,
        A_indptr=A.indptr,
        M_data=M.data,
        M_indices=M.indices,
        M_indptr=M.indptr,
        q=nep.q,
    )


def load_problem(path: str) -> DtnNep:
    """Read a matrix-family bundle written by :func:`save_problem`."""
    with np.load(path) as f:
        if int(f["format"]) != BUNDLE_FORMAT:
            raise ValueError(f"unsupported bundle format {int(f['format'])}")
        N = int(f["N"])
        A = sps.csr_matrix((f["A_data"], f["A_indices"], f["A_indptr"]), shape=(N, N))
        M = sps.csr_matrix((f["M_data"], f["M_indices"], f["M_indptr"]), shape=(N, N))
        return DtnNep(A, M, f["q"], float(f["a"]), int(f["nu_max"]))
