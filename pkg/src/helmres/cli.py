"""Command-line driver: build problems from config files, run the solver,
execute convergence sweeps, and emit plot-ready CSV.

Subcommands
-----------
solve            run TIAR on a configured problem, print Ritz pairs
sweep            convergence sweep over h / p / numax / iters vs references
bench            print reference tables, optionally with computed values
eval-hankel      evaluate H_nu(z) (and derivative vectors) pointwise
derivtable       dump a DtN derivative table
find-poles       locate Hankel zeros (poles of the DtN symbol) in a box
export-matrices  write the assembled matrix family to an .npz bundle

Complex quantities are emitted as two CSV columns (re, im) with 17
significant digits.  Exit codes: 0 ok, 2 config error, 3 numerical
failure, 4 geometry/mesh error.

Run configs are JSON objects::

    {
      "geometry": {"kind": "single_disk", "R": 1.0, "d": 0.5, "a": 2.0,
                   "eta_s": 2.0, "p": 10, "levels": 0, "nu_max": 25},
      "mu": [9.0, -0.1],
      "m": 80,
      "cancel": false,
      "pole_region": null,
      "tol": 1e-9,
      "scale": 1.0
    }

``mu`` is a [re, im] pair; ``pole_region`` (optional) is
[re_min, re_max, im_min, im_max] and only matters with ``cancel``.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

import numpy as np

from helmres.derivtable import build_table
from helmres.errors import (
    ConfigError,
    ConvergenceError,
    DomainError,
    FactorizationError,
    GeometryError,
    HelmresError,
    MeshError,
    PoleEvaluationError,
    RangeError,
    SingularDenominatorError,
)
from helmres.fem import GeometryConfig, build_problem
from helmres.nep import find_poles, save_problem
from helmres.reference import reference_table
from helmres.tiar import tiar_run

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_GEOMETRY = 4

_NUMERICAL_ERRORS = (
    ConvergenceError,
    FactorizationError,
    SingularDenominatorError,
    PoleEvaluationError,
    RangeError,
    DomainError,
)
_GEOMETRY_ERRORS = (GeometryError, MeshError)


def _fmt(x: float) -> str:
    """Locale-independent decimal, 17 significant digits."""
    return format(float(x), ".17g")


def _row(*vals) -> str:
    parts = []
    for v in vals:
        if isinstance(v, complex):
            parts.append(_fmt(v.real))
            parts.append(_fmt(v.imag))
        elif isinstance(v, (float, np.floating)):
            parts.append(_fmt(v))
        else:
            parts.append(str(v))
    return ",".join(parts)


def _emit(lines: list[str], out: str | None) -> None:
    text = "\n".join(lines) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


# -- run configuration --------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    """Solver run parameters wrapping a :class:`GeometryConfig`."""

    geometry: GeometryConfig
    mu: complex
    m: int = 60
    cancel: bool = False
    pole_region: tuple[float, float, float, float] | None = None
    tol: float = 1e-9
    scale: float = 1.0

    def __post_init__(self):
        if self.m < 1:
            raise ConfigError("iteration count m must be >= 1")
        if self.tol <= 0 or self.scale <= 0:
            raise ConfigError("tol and scale must be positive")
        if self.pole_region is not None and len(self.pole_region) != 4:
            raise ConfigError("pole_region must be [re_min, re_max, im_min, im_max]")

    def to_json(self) -> str:
        data = {
            "geometry": json.loads(self.geometry.to_json()),
            "mu": [self.mu.real, self.mu.imag],
            "m": self.m,
            "cancel": self.cancel,
            "pole_region": None if self.pole_region is None else list(self.pole_region),
            "tol": self.tol,
            "scale": self.scale,
        }
        return json.dumps(data, indent=2, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "RunConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed run config: {exc}") from exc
        if not isinstance(data, dict) or "geometry" not in data:
            raise ConfigError("run config must be an object with a 'geometry' entry")
        known = {"geometry", "mu", "m", "cancel", "pole_region", "tol", "scale"}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown run config keys: {sorted(extra)}")
        geometry = GeometryConfig.from_json(json.dumps(data["geometry"]))
        mu = data.get("mu", [0.0, 0.0])
        if not (isinstance(mu, list) and len(mu) == 2):
            raise ConfigError("mu must be a [re, im] pair")
        region = data.get("pole_region")
        return RunConfig(
            geometry=geometry,
            mu=complex(mu[0], mu[1]),
            m=int(data.get("m", 60)),
            cancel=bool(data.get("cancel", False)),
            pole_region=None if region is None else tuple(float(v) for v in region),
            tol=float(data.get("tol", 1e-9)),
            scale=float(data.get("scale", 1.0)),
        )

    @staticmethod
    def load(path) -> "RunConfig":
        with open(path) as fh:
            return RunConfig.from_json(fh.read())


def _parse_complex(text: str) -> complex:
    """Parse 're,im' or a plain real number."""
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise ConfigError(f"cannot parse complex value {text!r}; expected 're,im'")


def _parse_region(text: str) -> tuple[float, float, float, float]:
    parts = text.split(",")
    if len(parts) != 4:
        raise ConfigError("region must be 're_min,re_max,im_min,im_max'")
    try:
        return tuple(float(v) for v in parts)  # type: ignore[return-value]
    except ValueError as exc:
        raise ConfigError(f"bad region {text!r}") from exc


# -- subcommands --------------------------------------------------------


def cmd_solve(args) -> int:
    cfg = RunConfig.load(args.config)
    nep, _ = build_problem(cfg.geometry)
    pairs, state = tiar_run(
        nep,
        mu=cfg.mu,
        m=cfg.m,
        cancel=cfg.cancel,
        pole_region=cfg.pole_region,
        seed=args.seed,
        tol=cfg.tol,
        scale=cfg.scale,
        history=True,
    )
    lines = ["re_lambda,im_lambda,backward_error,iterations"]
    for pr in pairs:
        iters = state.k
        for snapshot in state.history:
            hit = any(
                abs(lam - pr.lam) <= 1e-8 * abs(pr.lam) and be <= cfg.tol
                for _, lam, be in snapshot
            )
            if hit:
                iters = snapshot[0][0] if snapshot else state.k
                break
        lines.append(_row(pr.lam, pr.backward_error, iters))
    _emit(lines, args.out)
    return EXIT_OK


_GEOMETRY_TABLE = {"single_disk": "single-disk", "dimer": "dimer"}


def _tracked_refs(cfg: RunConfig, track: str | None):
    table = _GEOMETRY_TABLE.get(cfg.geometry.kind)
    if table is None:
        raise ConfigError(f"no reference table for geometry kind {cfg.geometry.kind!r}")
    refs = {r.j: r.lam for r in reference_table(table)}
    if track is None:
        raise ConfigError("sweep requires --track with reference eigenvalue ids")
    try:
        ids = [int(t) for t in track.split(",")]
    except ValueError as exc:
        raise ConfigError(f"bad --track list {track!r}") from exc
    missing = [j for j in ids if j not in refs]
    if missing:
        raise ConfigError(f"unknown reference ids {missing} for table {table!r}")
    return ids, refs


def _sweep_errors(cfg: RunConfig, geometry: GeometryConfig, ids, refs, seed, m=None):
    nep, _ = build_problem(geometry)
    pairs, _ = tiar_run(
        nep,
        mu=cfg.mu,
        m=cfg.m if m is None else m,
        cancel=cfg.cancel,
        pole_region=cfg.pole_region,
        seed=seed,
        tol=cfg.tol,
        scale=cfg.scale,
    )
    errs = []
    for j in ids:
        best = min(pairs, key=lambda pr: abs(pr.lam - refs[j]))
        errs.append(abs(best.lam - refs[j]) / abs(refs[j]))
    return nep.N, errs


def cmd_sweep(args) -> int:
    from dataclasses import replace

    cfg = RunConfig.load(args.config)
    ids, refs = _tracked_refs(cfg, args.track)
    if args.values:
        try:
            values = [int(v) for v in args.values.split(",")]
        except ValueError as exc:
            raise ConfigError(f"bad --values list {args.values!r}") from exc
    else:
        values = {
            "h": list(range(cfg.geometry.levels, cfg.geometry.levels + 4)),
            "p": list(range(2, 11)),
            "numax": list(range(5, cfg.geometry.nu_max + 1, 5)),
            "iters": list(range(10, cfg.m + 1, 10)),
        }[args.axis]
    header = [args.axis, "N"] + [f"err_{j}" for j in ids]
    lines = [",".join(header)]
    for v in values:
        geometry = cfg.geometry
        m = None
        if args.axis == "h":
            geometry = replace(geometry, levels=v)
        elif args.axis == "p":
            geometry = replace(geometry, p=v)
        elif args.axis == "numax":
            geometry = replace(geometry, nu_max=v)
        else:
            m = v
        N, errs = _sweep_errors(cfg, geometry, ids, refs, args.seed, m=m)
        lines.append(_row(v, N, *[float(e) for e in errs]))
    _emit(lines, args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    records = reference_table(args.geometry)
    computed = {}
    if args.config:
        cfg = RunConfig.load(args.config)
        nep, _ = build_problem(cfg.geometry)
        pairs, _ = tiar_run(
            nep,
            mu=cfg.mu,
            m=cfg.m,
            cancel=cfg.cancel,
            pole_region=cfg.pole_region,
            seed=args.seed,
            tol=cfg.tol,
            scale=cfg.scale,
        )
        for rec in records:
            best = min(pairs, key=lambda pr: abs(pr.lam - rec.lam))
            computed[rec.j] = best.lam
    if computed:
        lines = ["j,re_ref,im_ref,re_computed,im_computed,rel_diff"]
        for rec in records:
            c = computed[rec.j]
            lines.append(_row(rec.j, rec.lam, c, abs(c - rec.lam) / abs(rec.lam)))
    else:
        lines = ["j,re_ref,im_ref,source"]
        for rec in records:
            lines.append(_row(rec.j, rec.lam, rec.source))
    _emit(lines, args.out)
    return EXIT_OK


def cmd_eval_hankel(args) -> int:
    from helmres.hankel import hankel1, hankel_derivative_vectors

    z = _parse_complex(args.z)
    if args.kmax == 0:
        lines = ["re,im"]
        lines.append(_row(hankel1(args.nu, z)))
    else:
        # Derivative vectors of lam -> H_nu(a lam) at lam = z, a = 1.
        vecs = hankel_derivative_vectors(args.nu, args.kmax, 1.0, z)
        lines = ["k," + ",".join(f"re_nu{n},im_nu{n}" for n in range(args.nu + 1))]
        for k, vec in enumerate(vecs):
            lines.append(_row(k, *[complex(v) for v in vec[: args.nu + 1]]))
    _emit(lines, args.out)
    return EXIT_OK


def cmd_derivtable(args) -> int:
    mu = _parse_complex(args.mu)
    poles = []
    if args.poles:
        poles = [_parse_complex(p) for p in args.poles.split(";") if p]
    table = build_table(mu, args.a, args.numax, args.kmax, poles)
    lines = ["j," + ",".join(f"re_nu{n},im_nu{n}" for n in range(args.numax + 1))]
    for j in range(args.kmax + 1):
        row = [table.raw_derivatives(nu)[j] for nu in range(args.numax + 1)]
        lines.append(_row(j, *row))
    _emit(lines, args.out)
    return EXIT_OK


def cmd_find_poles(args) -> int:
    region = _parse_region(args.region)
    poles = find_poles(args.a, args.numax, region)
    lines = ["nu,re,im,residual"]
    for rec in poles.poles:
        lines.append(_row(rec.nu, rec.z, rec.residual))
    _emit(lines, args.out)
    return EXIT_OK


def cmd_export_matrices(args) -> int:
    cfg = RunConfig.load(args.config)
    nep, _ = build_problem(cfg.geometry)
    if args.out is None:
        raise ConfigError("export-matrices requires --out")
    save_problem(nep, args.out)
    return EXIT_OK


# -- argument parsing ---------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="helmres",
        description="Scattering resonances of 2D Helmholtz problems (FEM + DtN + TIAR).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("--config", required=True, help="run config JSON path")
        p.add_argument("--out", default=None, help="output CSV path (default stdout)")
        p.add_argument("--seed", type=int, default=0, help="start-vector seed")

    p = sub.add_parser("solve", help="run TIAR and print Ritz pairs")
    common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="convergence sweep against reference values")
    common(p)
    p.add_argument("--axis", required=True, choices=("h", "p", "numax", "iters"))
    p.add_argument("--track", default=None, help="comma list of reference ids, e.g. 1,3")
    p.add_argument("--values", default=None, help="comma list overriding the sweep grid")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bench", help="print reference (and optionally computed) tables")
    p.add_argument("--geometry", default="single-disk", help="reference table id")
    p.add_argument("--config", default=None, help="optional run config to compute against")
    p.add_argument("--out", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("eval-hankel", help="evaluate H_nu(z) or derivative vectors")
    p.add_argument("--nu", type=int, required=True)
    p.add_argument("--z", required=True, help="complex point 're,im'")
    p.add_argument("--kmax", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_eval_hankel)

    p = sub.add_parser("derivtable", help="dump a DtN derivative table as CSV")
    p.add_argument("--mu", required=True, help="shift 're,im'")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--numax", type=int, required=True)
    p.add_argument("--kmax", type=int, required=True)
    p.add_argument("--poles", default=None, help="semicolon list of 're,im' pole locations")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_derivtable)

    p = sub.add_parser("find-poles", help="Hankel zeros of the DtN symbol in a box")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--numax", type=int, required=True)
    p.add_argument("--region", required=True, help="'re_min,re_max,im_min,im_max'")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_find_poles)

    p = sub.add_parser("export-matrices", help="write the matrix family to .npz")
    common(p)
    p.set_defaults(func=cmd_export_matrices)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _GEOMETRY_ERRORS as exc:
        print(f"geometry error: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except HelmresError as exc:  # pragma: no cover - safety net
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
