"""Curvilinear quadrilateral meshes of the disk Omega_a.

Every cell carries a geometry map built from transfinite blending between
two parametric curves,

    Phi(s, t) = (1 - s) * C_in(t) + s * C_out(t),      (s, t) in [0,1]^2,

which reproduces circles of exact radius on curved edges.  The disk is
decomposed into a central square plus four blended blocks; resonator
geometries add ring/blend layers whose edges coincide exactly with the
material interfaces, so eta^2 is analytic on every cell.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from helmres.errors import GeometryError
from helmres.fem.curves import Arc, Curve, Segment, ray_hit_circle, ray_hit_segment


@dataclass(frozen=True)
class BlendBlock:
    """Transfinite blend between an inner and an outer curve."""

    inner: Curve
    outer: Curve

    def eval(self, s, t):
        s = np.asarray(s, dtype=float)
        t = np.asarray(t, dtype=float)
        xi, yi = self.inner.point(t)
        xo, yo = self.outer.point(t)
        txi, tyi = self.inner.tangent(t)
        txo, tyo = self.outer.tangent(t)
        x = (1.0 - s) * xi + s * xo
        y = (1.0 - s) * yi + s * yo
        dxds = xo - xi
        dyds = yo - yi
        dxdt = (1.0 - s) * txi + s * txo
        dydt = (1.0 - s) * tyi + s * tyo
        return x, y, dxds, dxdt, dyds, dydt


def bilinear_block(p00, p10, p01, p11) -> BlendBlock:
    """Straight-sided quadrilateral as a blend of two segments.

    s runs from edge p00-p01 (t along it) to edge p10-p11.
    """
    return BlendBlock(Segment(p00, p01), Segment(p10, p11))


@dataclass(frozen=True)
class Cell:
    """One quadrilateral: a block map restricted to a parameter rectangle.

    Reference coordinates (xi, eta) in [-1, 1]^2 map affinely to the block
    parameters (s, t); ``on_outer`` flags cells whose s = 1 edge lies on the
    truncation circle Gamma_a.
    """

    block: BlendBlock
    s0: float
    s1: float
    t0: float
    t1: float
    region: int = 0
    on_outer: bool = False

    def map(self, xi, eta):
        """Geometry and Jacobian at reference points (broadcasting arrays).

        Returns x, y, and the 2x2 Jacobian entries d(x,y)/d(xi,eta).
        """
        s = self.s0 + (np.asarray(xi) + 1.0) * 0.5 * (self.s1 - self.s0)
        t = self.t0 + (np.asarray(eta) + 1.0) * 0.5 * (self.t1 - self.t0)
        x, y, dxds, dxdt, dyds, dydt = self.block.eval(s, t)
        js = 0.5 * (self.s1 - self.s0)
        jt = 0.5 * (self.t1 - self.t0)
        return x, y, dxds * js, dxdt * jt, dyds * js, dydt * jt


@dataclass(frozen=True)
class Mesh:
    """Conforming curvilinear quadrilateral mesh of the disk of radius a."""

    a: float
    cells: tuple[Cell, ...]
    level: int = 0

    @property
    def cell_count(self) -> int:
        return len(self.cells)


# ----------------------------------------------------------------------------
# disk blocks: central square + four blended quadrant blocks


def _quadrant_of(theta: float) -> int:
    """Quadrant index for an angle in [-pi/4, 7pi/4)."""
    return int(np.floor((theta + np.pi / 4) / (np.pi / 2))) % 4


def _fill_angles(forced: list[float], target: float) -> np.ndarray:
    """Angular grid containing the forced angles, gaps filled near ``target``.

    ``forced`` must be sorted and span one full turn (last - first = 2*pi is
    implied by wrap-around of the final gap).
    """
    forced = sorted(forced)
    grid = []
    closed = forced + [forced[0] + 2.0 * np.pi]
    for lo, hi in zip(closed[:-1], closed[1:]):
        gap = hi - lo
        m = max(1, int(round(gap / target)))
        grid.extend(lo + gap * np.arange(m) / m)
    return np.asarray(grid)


def disk_cells(
    center: tuple[float, float],
    R: float,
    angles: np.ndarray,
    n_rad: int,
    region: int,
    on_outer: bool = False,
    square_frac: float = 0.5,
) -> list[Cell]:
    """Five-block decomposition of a disk, outer boundary split at ``angles``.

    ``angles`` is the sorted circular grid starting in [-pi/4, pi/4); it must
    contain the four quadrant corners -pi/4 + q*pi/2.  The central square has
    half-width square_frac * R; each quadrant blends its square edge to the
    corresponding arc, subdivided radially into n_rad layers.
    """
    cx, cy = center
    ell = square_frac * R
    angles = np.asarray(angles, dtype=float)
    corners = -np.pi / 4 + np.pi / 2 * np.arange(5)
    idx = [int(np.argmin(np.abs(angles - c))) for c in corners[:4]]
    for q in range(4):
        if abs(angles[idx[q]] - corners[q]) > 1e-12:
            raise GeometryError("angular grid must contain the quadrant corners")
    cells: list[Cell] = []
    # Square corner positions, ccw starting at angle -pi/4.
    sq = [(cx + ell, cy - ell), (cx + ell, cy + ell), (cx - ell, cy + ell), (cx - ell, cy - ell)]
    # Per-quadrant parameter fractions along the outer arc / inner edge.
    closed = np.concatenate([angles, [angles[0] + 2 * np.pi]])
    frac_q = []
    for q in range(4):
        j0 = idx[q]
        j1 = idx[q + 1] if q < 3 else len(angles)
        th = closed[j0 : j1 + 1]
        frac_q.append((th - corners[q]) / (np.pi / 2))
    # Blend blocks: quadrant q goes from square edge sq[q] -> sq[(q+1)%4]
    # to Arc(corners[q], corners[q+1]).
    for q in range(4):
        edge = Segment(sq[q], sq[(q + 1) % 4])
        arc = Arc(center, R, corners[q], corners[q + 1])
        f = frac_q[q]
        for j in range(len(f) - 1):
            block = BlendBlock(edge.subdivide(f[j], f[j + 1]), arc.subdivide(f[j], f[j + 1]))
            for i in range(n_rad):
                cells.append(
                    Cell(
                        block,
                        i / n_rad,
                        (i + 1) / n_rad,
                        0.0,
                        1.0,
                        region=region,
                        on_outer=on_outer and i == n_rad - 1,
                    )
                )
    # Central square: x-subdivision from the south quadrant (q3, x increasing),
    # y-subdivision from the east quadrant (q0, y increasing).
    fx = frac_q[3]
    fy = frac_q[0]
    block = bilinear_block(sq[3], sq[0], sq[2], sq[1])  # s: x direction, t: y
    for i in range(len(fx) - 1):
        for j in range(len(fy) - 1):
            cells.append(Cell(block, fx[i], fx[i + 1], fy[j], fy[j + 1], region=region))
    return cells


@dataclass(frozen=True)
class MirrorBlock:
    """Reflection of a block across the x-axis, t reversed to keep det J > 0."""

    base: BlendBlock

    def eval(self, s, t):
        x, y, dxds, dxdt, dyds, dydt = self.base.eval(s, 1.0 - np.asarray(t, dtype=float))
        return x, -y, dxds, -dxdt, -dyds, dydt


def _mirror_cells(cells: list[Cell]) -> list[Cell]:
    out = []
    for c in cells:
        out.append(
            Cell(
                MirrorBlock(c.block),
                c.s0,
                c.s1,
                1.0 - c.t1,
                1.0 - c.t0,
                region=c.region,
                on_outer=c.on_outer,
            )
        )
    return out


def build_disk_mesh(a: float, levels: int, region: int = 0) -> Mesh:
    """Plain disk of radius a: 5 cells at level 0, uniform 4-splitting after."""
    if levels < 0:
        raise GeometryError("levels must be >= 0")
    n = 2**levels
    grid = _fill_angles(list(-np.pi / 4 + np.pi / 2 * np.arange(4)), 2 * np.pi / (4 * n))
    cells = disk_cells((0.0, 0.0), a, grid, n, region, on_outer=True)
    return Mesh(a=float(a), cells=tuple(cells), level=levels)


def single_disk_mesh(R: float, d: float, a: float, levels: int = 0, base_n: int = 3) -> Mesh:
    """Shifted resonator disk (radius R, center (d, 0)) inside Gamma_a.

    The resonator gets the 5-block decomposition (region 1); the complement
    is a blended annulus between the resonator circle and Gamma_a whose
    radial lines are rays from the resonator center, so the map is injective
    whenever the resonator lies strictly inside Gamma_a.
    """
    if d + R >= a or R - d >= a:
        raise GeometryError("resonator disk touches or crosses Gamma_a")
    n = base_n * 2**levels
    grid = _fill_angles(list(-np.pi / 4 + np.pi / 2 * np.arange(4)), 2 * np.pi / (4 * n))
    cells = disk_cells((d, 0.0), R, grid, n, region=1)
    # Ray images of the grid angles on Gamma_a, unwrapped for monotone arcs.
    closed = np.concatenate([grid, [grid[0] + 2 * np.pi]])
    phi = []
    for th in closed:
        direction = (np.cos(th), np.sin(th))
        t_hit = ray_hit_circle((d, 0.0), direction, (0.0, 0.0), a)
        phi.append(np.arctan2(np.sin(th) * t_hit, d + np.cos(th) * t_hit))
    phi = np.unwrap(np.asarray(phi))
    n_rad = 2 * n
    for j in range(len(grid)):
        block = BlendBlock(
            Arc((d, 0.0), R, closed[j], closed[j + 1]),
            Arc((0.0, 0.0), a, phi[j], phi[j + 1]),
        )
        for i in range(n_rad):
            cells.append(
                Cell(block, i / n_rad, (i + 1) / n_rad, 0.0, 1.0, region=0, on_outer=i == n_rad - 1)
            )
    return Mesh(a=float(a), cells=tuple(cells), level=levels)


def _band_outer_point(c, theta, r_m):
    """Exit point of the ray from c at angle theta through the upper band
    boundary (half disk of radius r_m cut at y = 0)."""
    direction = (np.cos(theta), np.sin(theta))
    if direction[1] < -1e-14:
        t_seg = c[1] / (-direction[1])
        x_hit = c[0] + t_seg * direction[0]
        if abs(x_hit) <= r_m * (1.0 - 1e-12):
            return (x_hit, 0.0), "segment"
    t_hit = ray_hit_circle(c, direction, (0.0, 0.0), r_m)
    return (c[0] + t_hit * direction[0], c[1] + t_hit * direction[1]), "arc"


def dimer_mesh(
    R: float, s: float, a: float, levels: int = 0, base_n: int = 2, r_m: float | None = None
) -> Mesh:
    """Two identical disks of radius R separated by s, mirror-symmetric in y.

    Upper half: 5-block disk at (0, R + s/2), then a ray-matched blend from
    the resonator circle to the half-disk boundary of radius r_m (arc plus
    the y = 0 chord); the lower half is the mirror image, and a polar annulus
    r_m -> a closes the mesh.  All interfaces are exact circles.
    """
    yc = R + s / 2.0
    if r_m is None:
        r_m = 0.5 * (yc + R + a)
    if yc + R >= r_m or r_m >= a:
        raise GeometryError("dimer layout does not fit inside Gamma_a")
    c = (0.0, yc)
    n = base_n * 2**levels
    th_c1 = float(np.arctan2(-yc, r_m))  # ray angle of the corner (r_m, 0)
    th_c2 = float(np.pi - th_c1)  # corner (-r_m, 0)
    forced = list(-np.pi / 4 + np.pi / 2 * np.arange(4)) + [th_c1 + 2 * np.pi * (th_c1 < -np.pi / 4), th_c2]
    grid = _fill_angles(forced, 2 * np.pi / (4 * n))
    upper = disk_cells(c, R, grid, n, region=1)
    closed = np.concatenate([grid, [grid[0] + 2 * np.pi]])
    arc_phis: list[float] = []
    for j in range(len(grid)):
        th0, th1 = closed[j], closed[j + 1]
        p0, k0 = _band_outer_point(c, th0, r_m)
        p1, k1 = _band_outer_point(c, th1, r_m)
        _, km = _band_outer_point(c, 0.5 * (th0 + th1), r_m)
        if km == "arc":
            f0 = float(np.arctan2(p0[1], p0[0]))
            f1 = float(np.arctan2(p1[1], p1[0]))
            if f0 <= 1e-12 and f1 > 0:
                f0 = 0.0
            if f1 <= 1e-12 < f0:
                f1 = np.pi
            outer: Curve = Arc((0.0, 0.0), r_m, f0, f1)
            arc_phis.extend([f0, f1])
        else:
            outer = Segment(p0, p1)
        block = BlendBlock(Arc(c, R, th0, th1), outer)
        for i in range(n):
            upper.append(Cell(block, i / n, (i + 1) / n, 0.0, 1.0, region=0))
    cells = upper + _mirror_cells(upper)
    # Polar annulus r_m -> a; its angular grid joins the arc breakpoints of
    # both halves so the interface at radius r_m is conforming.
    phis = sorted(set(round(f, 12) for f in arc_phis) | set(round(-f, 12) for f in arc_phis))
    phis = [f for f in phis if -np.pi < f - 1e-9]
    closed_phi = phis + [phis[0] + 2 * np.pi]
    for j in range(len(phis)):
        block = BlendBlock(
            Arc((0.0, 0.0), r_m, closed_phi[j], closed_phi[j + 1]),
            Arc((0.0, 0.0), a, closed_phi[j], closed_phi[j + 1]),
        )
        for i in range(n):
            cells.append(
                Cell(block, i / n, (i + 1) / n, 0.0, 1.0, region=0, on_outer=i == n - 1)
            )
    return Mesh(a=float(a), cells=tuple(cells), level=levels)
