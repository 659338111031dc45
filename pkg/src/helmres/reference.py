"""Reference resonances: the single-disk resonance relation with a complex
Newton solver, and embedded benchmark tables for regression tests.

The single-disk (radius R, index eta_s) resonances satisfy

    J_m(lam eta_s R) H_m'(lam R) - eta_s J_m'(lam eta_s R) H_m(lam R) = 0,

separately for every angular mode m.  Solutions with Im lam close to zero
are interior (whispering-gallery) resonances; large |Im lam| marks exterior
resonances.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.special as sp

from helmres.errors import ConfigError, ConvergenceError, DomainError


def disk_relation(m: int, lam: complex, R: float = 1.0, eta_s: float = 2.0) -> complex:
    """The resonance relation; zero exactly at a resonance of mode m."""
    if lam == 0:
        raise DomainError("relation undefined at lam = 0")
    z1 = lam * eta_s * R
    z2 = lam * R
    return complex(
        sp.jv(m, z1) * sp.h1vp(m, z2) - eta_s * sp.jvp(m, z1) * sp.hankel1(m, z2)
    )


def _relation_derivative(m: int, lam: complex, R: float, eta_s: float) -> complex:
    """d/dlam of disk_relation; the cross terms cancel analytically."""
    z1 = lam * eta_s * R
    z2 = lam * R
    return complex(
        R * sp.jv(m, z1) * sp.h1vp(m, z2, 2) - eta_s**2 * R * sp.jvp(m, z1, 2) * sp.hankel1(m, z2)
    )


def newton_resonance(
    m: int,
    seed: complex,
    R: float = 1.0,
    eta_s: float = 2.0,
    tol: float = 1e-14,
    max_iter: int = 100,
) -> complex:
    """Newton iteration on the resonance relation from a given seed.

    Converges when |dlam| <= tol * |lam|; the derivative is analytic (Bessel
    recurrences), so the iteration is quadratic all the way down.
    """
    lam = complex(seed)
    trace = []
    for _ in range(max_iter):
        f = disk_relation(m, lam, R, eta_s)
        fp = _relation_derivative(m, lam, R, eta_s)
        step = f / fp
        lam -= step
        trace.append(lam)
        if abs(step) <= tol * abs(lam):
            return lam
    raise ConvergenceError(
        f"Newton did not converge for m={m}, seed={seed}; trace tail {trace[-3:]}"
    )


@dataclass(frozen=True)
class ReferenceResonance:
    """One benchmark eigenvalue record."""

    j: int
    lam: complex
    geometry: str
    source: str  # "exact-relation" | "paper-table"
    m: int | None = None
    seed: complex | None = None


#: Single-disk benchmark (R=1, d=0, eta_s=2): exact roots of the relation,
#: ordered by |Im lam| within each shift group.
_SINGLE_DISK = (
    ReferenceResonance(1, 9.021766303207 - 0.273829280623j, "single-disk", "exact-relation", m=1, seed=9.0 - 0.27j),
    ReferenceResonance(2, 8.936779164355 - 0.164935525246j, "single-disk", "exact-relation", m=8, seed=8.94 - 0.16j),
    ReferenceResonance(3, 8.783835782061 - 0.000247588219j, "single-disk", "exact-relation", m=14, seed=8.78 - 0.001j),
    ReferenceResonance(4, 19.243876046899 - 0.274713999601j, "single-disk", "exact-relation", m=0, seed=19.2 - 0.3j),
    ReferenceResonance(5, 19.241527655113 - 0.104420737352j, "single-disk", "exact-relation", m=19, seed=19.24 - 0.10j),
    ReferenceResonance(6, 19.156200970821 - 0.000653924318j, "single-disk", "exact-relation", m=25, seed=19.16 - 0.001j),
)

#: Disk-dimer benchmark (R=1/4, s=R, eta=2, a=1), high-resolution regression
#: values; not re-derivable in closed form.
_DIMER_VALUES = (
    (1, 3.499842 - 8.4003189j),
    (2, 3.082426 - 8.1795102j),
    (3, 3.662856165 - 4.980016551j),
    (4, 3.035882038 - 4.910209072j),
    (5, 1.0986166110 - 1.00574509569j),
    (6, 2.1655203793 - 0.53731229013j),
    (7, 4.3700360826 - 1.52656168626j),
    (8, 3.9580686857 - 0.52895955645j),
    (9, 4.8949905287 - 0.40281083717j),
    (10, 20.0018652230 - 1.19979332765j),
    (11, 19.1590173402 - 0.63161790252j),
    (12, 20.3296169084 - 0.53046501438j),
    (13, 21.0596179198 - 0.41347266647j),
    (14, 19.1765650857 - 0.08415304732j),
    (15, 19.2563064489 - 0.06652895684j),
    (16, 99.0706091289 - 0.53389807975j),
    (17, 98.6967997099 - 0.386922639003j),
    (18, 98.8356759636 - 0.069143373791j),
    (19, 98.8254516105 - 0.059689390790j),
    (20, 99.4061929966 - 0.000006880063j),
    (21, 99.4061923466 - 0.000006849959j),
    (22, 99.4061921097 - 0.000009251593j),
    (23, 99.4061941089 - 0.000009059285j),
    (24, 99.2530774600 - 0.000000004940j),
    (25, 99.2530774626 - 0.000000004465j),
    (26, 99.2530774593 - 0.000000004441j),
    (27, 99.2530774637 - 0.000000004263j),
    (28, 99.2229411961 - 0.0000000000001j),
)

_DIMER = tuple(
    ReferenceResonance(j, lam, "dimer", "paper-table") for j, lam in _DIMER_VALUES
)

_TABLES = {"single-disk": _SINGLE_DISK, "dimer": _DIMER}


def reference_table(geometry: str) -> tuple[ReferenceResonance, ...]:
    """All embedded benchmark records for a geometry id."""
    try:
        return _TABLES[geometry]
    except KeyError:
        raise ConfigError(
            f"unknown geometry id {geometry!r}; expected one of {sorted(_TABLES)}"
        ) from None


def reference_value(geometry: str, j: int) -> complex:
    """The benchmark eigenvalue with index j."""
    for rec in reference_table(geometry):
        if rec.j == j:
            return rec.lam
    raise ConfigError(f"no record j={j} for geometry {geometry!r}")
