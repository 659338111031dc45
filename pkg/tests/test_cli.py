"""CLI: subcommands, CSV format, determinism, exit codes, config round-trip."""

import json

import numpy as np
import pytest

from helmres.cli import RunConfig, main
from helmres.errors import ConfigError
from helmres.fem import GeometryConfig
from helmres.nep import load_problem


@pytest.fixture(scope="module")
def sd_config_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("cfg") / "sd.json"
    cfg = {
        "geometry": {
            "kind": "single_disk",
            "R": 1.0,
            "d": 0.5,
            "a": 2.0,
            "eta_s": 2.0,
            "p": 4,
            "levels": 0,
            "nu_max": 8,
        },
        "mu": [9.0, -0.1],
        "m": 40,
    }
    path.write_text(json.dumps(cfg))
    return str(path)


def read_csv(path):
    lines = open(path).read().strip().splitlines()
    return lines[0].split(","), [ln.split(",") for ln in lines[1:]]


def test_run_config_roundtrip():
    cfg = RunConfig(
        geometry=GeometryConfig(kind="single_disk", a=2.0, R=1.0, d=0.5, eta_s=2.0),
        mu=9.0 - 0.1j,
        m=50,
        cancel=True,
        pole_region=(0.0, 2.0, -1.5, 0.0),
    )
    assert RunConfig.from_json(cfg.to_json()) == cfg
    with pytest.raises(ConfigError):
        RunConfig.from_json('{"mu": [1, 2]}')
    with pytest.raises(ConfigError):
        RunConfig.from_json('{"geometry": {"kind": "empty"}, "bogus": 1}')


def test_solve_and_determinism(sd_config_path, tmp_path):
    out1, out2 = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
    assert main(["solve", "--config", sd_config_path, "--seed", "3", "--out", out1]) == 0
    assert main(["solve", "--config", sd_config_path, "--seed", "3", "--out", out2]) == 0
    assert open(out1, "rb").read() == open(out2, "rb").read()
    header, rows = read_csv(out1)
    assert header == ["re_lambda", "im_lambda", "backward_error", "iterations"]
    assert rows
    lams = [complex(float(r[0]), float(r[1])) for r in rows]
    # The coarse problem still localizes lambda_1.
    assert min(abs(l - (9.021766 - 0.273829j)) for l in lams) < 0.2


def test_exit_codes(tmp_path):
    assert main(["solve", "--config", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"geometry": {"kind": "bogus"}}')
    assert main(["solve", "--config", str(bad)]) == 2
    geo = tmp_path / "geo.json"
    geo.write_text(
        json.dumps(
            {
                "geometry": {"kind": "single_disk", "R": 1.0, "d": 1.5, "a": 2.0, "eta_s": 2.0},
                "mu": [9.0, -0.1],
            }
        )
    )
    assert main(["solve", "--config", str(geo)]) == 4
    # Shift exactly on a pole of the DtN symbol: numerical failure.
    num = tmp_path / "num.json"
    num.write_text(
        json.dumps(
            {
                "geometry": {
                    "kind": "single_disk",
                    "R": 1.0,
                    "d": 0.5,
                    "a": 2.0,
                    "eta_s": 2.0,
                    "p": 2,
                    "nu_max": 4,
                },
                "mu": [0.21474248260435996, -0.64068689882804808],
                "m": 10,
            }
        )
    )
    assert main(["solve", "--config", str(num)]) == 3


def test_sweep_numax(sd_config_path, tmp_path):
    out = str(tmp_path / "sweep.csv")
    rc = main(
        [
            "sweep",
            "--config",
            sd_config_path,
            "--axis",
            "numax",
            "--track",
            "1",
            "--values",
            "4,8",
            "--out",
            out,
        ]
    )
    assert rc == 0
    header, rows = read_csv(out)
    assert header == ["numax", "N", "err_1"]
    assert len(rows) == 2
    assert all(float(r[2]) < 1.0 for r in rows)


def test_sweep_requires_track(sd_config_path):
    assert main(["sweep", "--config", sd_config_path, "--axis", "numax"]) == 2


def test_bench_reference_table(tmp_path, capsys):
    assert main(["bench", "--geometry", "single-disk"]) == 0
    out = capsys.readouterr().out.strip().splitlines()
    assert out[0] == "j,re_ref,im_ref,source"
    assert len(out) == 7
    assert main(["bench", "--geometry", "unknown"]) == 2


def test_eval_hankel(capsys):
    assert main(["eval-hankel", "--nu", "0", "--z", "1"]) == 0
    out = capsys.readouterr().out.strip().splitlines()
    re, im = (float(v) for v in out[1].split(","))
    assert abs(complex(re, im) - (0.765197686557967 + 0.088256964215677j)) < 1e-12


def test_derivtable_k0(capsys):
    assert main(["derivtable", "--mu", "2,-0.5", "--a", "2", "--numax", "2", "--kmax", "0"]) == 0
    out = capsys.readouterr().out.strip().splitlines()
    assert len(out) == 2
    vals = out[1].split(",")
    assert vals[0] == "0" and len(vals) == 7
    # Entry nu=0 equals g_0(mu) computed directly.
    from helmres.hankel import hankel1

    mu, a = 2.0 - 0.5j, 2.0
    g0 = mu * (-hankel1(1, a * mu)) / hankel1(0, a * mu)
    got = complex(float(vals[1]), float(vals[2]))
    assert abs(got - g0) < 1e-12 * abs(g0)


def test_find_poles_cli(capsys):
    assert main(["find-poles", "--a", "2", "--numax", "6", "--region", "0.5,3,0.1,1.5"]) == 0
    assert capsys.readouterr().out.strip() == "nu,re,im,residual"
    assert main(["find-poles", "--a", "2", "--numax", "6", "--region", "0,2.5,-1.5,0"]) == 0
    out = capsys.readouterr().out.strip().splitlines()
    assert len(out) > 1


def test_export_matrices(sd_config_path, tmp_path):
    out = str(tmp_path / "bundle.npz")
    assert main(["export-matrices", "--config", sd_config_path, "--out", out]) == 0
    nep = load_problem(out)
    assert nep.a == 2.0 and nep.nu_max == 8
    assert main(["export-matrices", "--config", sd_config_path]) == 2
