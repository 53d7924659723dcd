import json
from importlib import resources

import jsonschema
import numpy as np
import pytest
import yaml

from xstar import cli
from xstar.config import ConfigError, build_integrand, load, parse_text, validate
from xstar.grid import GridDomain, read_csv

REPORT_SCHEMA = json.loads(resources.files("xstar").joinpath("schemas", "report.schema.json").read_text())


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj) if name.endswith(".json") else yaml.safe_dump(obj))
    return str(p)


def run(argv):
    return cli.main(argv + ["--quiet"])


AFFINE = {"integrand": {"kind": "Quadratic"}, "boundary": {"affine": {"a": [1, -2], "b": 0.5}}}


def test_solve_affine_writes_outputs(tmp_path):
    cfg = write(tmp_path, "c.json", dict(AFFINE, command="solve", heatmap=True))
    out = tmp_path / "o"
    assert run(["solve", "--config", cfg, "--out", str(out)]) == 0
    head, vals = read_csv(out / "solution.csv")
    d = GridDomain.square(h=1 / 32)
    X, Y = d.coords()
    assert np.max(np.abs(vals - (X - 2 * Y + 0.5))) <= 1e-8
    rep = json.loads((out / "report.json").read_text())
    jsonschema.validate(rep, REPORT_SCHEMA)
    assert rep["status"] == "pass" and "wall_time" not in rep["solve"]
    assert (out / "heatmap.pgm").read_bytes().startswith(b"P5\n33 33\n255\n")


def test_grid_flag_sets_resolution(tmp_path):
    cfg = write(tmp_path, "c.yaml", dict(AFFINE, command="solve"))
    out = tmp_path / "o"
    assert run(["solve", "--config", cfg, "--out", str(out), "--grid", "16"]) == 0
    head, _ = read_csv(out / "solution.csv")
    assert head["nx"] == 17 and head["h"] == 1 / 16


def test_bsc_affine_reports_slope_norm(tmp_path):
    cfg = write(tmp_path, "b.json", dict(AFFINE, command="bsc"))
    out = tmp_path / "o"
    assert run(["bsc", "--config", cfg, "--out", str(out)]) == 0
    rep = json.loads((out / "report.json").read_text())
    jsonschema.validate(rep, REPORT_SCHEMA)
    assert rep["bsc"]["certificate"]["Q"] == pytest.approx(5 ** 0.5, abs=1e-15)


def test_bsc_failure_exit_code(tmp_path):
    cfg = write(tmp_path, "b.json", {"command": "bsc", "boundary": {"expression": "x^2"}})
    assert run(["bsc", "--config", cfg, "--out", str(tmp_path / "o")]) == 1


def test_sweep_affine_and_eight_thirds(tmp_path):
    cfg = write(tmp_path, "s.json", dict(AFFINE, command="sweep", sweep={"h": [1 / 16, 1 / 32, 1 / 64]}))
    out = tmp_path / "o"
    assert run(["sweep", "--config", cfg, "--out", str(out)]) == 0
    lines = (out / "sweep.csv").read_text().splitlines()
    assert lines[0] == "h,lambda,functional_value,sup_error,lipschitz,runtime"
    errs = [float(r.split(",")[3]) for r in lines[1:]]
    assert len(errs) == 3 and max(errs) <= 1e-8
    cfg = write(tmp_path, "z.json", {"command": "sweep", "integrand": {"kind": "Quadratic"},
                                     "boundary": {"expression": "0"}, "sweep": {"h": [1 / 16, 1 / 32, 1 / 64]}})
    assert run(["sweep", "--config", cfg, "--out", str(out)]) == 0
    vals = [float(r.split(",")[2]) for r in (out / "sweep.csv").read_text().splitlines()[1:]]
    gaps = [abs(v - 8 / 3) for v in vals]
    assert gaps[0] > gaps[1] > gaps[2] and gaps[2] < 2e-3
    rep = json.loads((out / "report.json").read_text())
    assert rep["sweep"]["monotone"]["functional_value"] == "non-decreasing"


def test_lambda_sweep_monotone(tmp_path):
    cfg = write(tmp_path, "l.json", {"command": "sweep", "integrand": {"kind": "EuclideanNorm"},
                                     "domain": {"shape": "square", "h": 0.0625},
                                     "boundary": {"expression": "x^2 - y"}, "sweep": {"lambda": [1, 0.1, 0.01]}})
    out = tmp_path / "o"
    assert run(["sweep", "--config", cfg, "--out", str(out)]) == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["sweep"]["monotone"]["functional_value"] == "non-decreasing"


def test_relaxed_command(tmp_path):
    cfg = write(tmp_path, "r.json", {"command": "solve-relaxed", "integrand": {"kind": "MinimalSurface"},
                                     "domain": {"shape": "disk", "radius": 1, "h": 0.0625},
                                     "boundary": {"expression": "x^2 - y^2"}})
    out = tmp_path / "o"
    assert run(["solve-relaxed", "--config", cfg, "--out", str(out)]) == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["solve"]["mode"] == "relaxed" and rep["solve"]["value"]["boundary_penalty"] == 0.0
    cfg = write(tmp_path, "q.json", {"command": "solve-relaxed", "integrand": {"kind": "Quadratic"}})
    assert run(["solve-relaxed", "--config", cfg, "--out", str(out)]) == 2


@pytest.mark.parametrize("bad", [
    {"command": "solve", "extra": 1},
    {"command": "solve", "integrand": {"kind": "Cubic"}},
    {"command": "solve", "domain": {"shape": "square", "side": -1}},
    {"command": "solve", "boundary": {"expression": "x**2"}},
    {"command": "solve", "boundary": {"expression": "exp(x)"}},
    {"command": "solve", "boundary": {"affine": {"a": [1], "b": 0}}},
    {"command": "verify", "checks": ["no_such_check"]},
    {"command": "sweep"},
    {"command": "solve", "integrand": {"kind": "AnisotropicNorm"}},
])
def test_config_errors_exit_2(tmp_path, bad, capsys):
    cfg = write(tmp_path, "bad.json", bad)
    assert run([bad["command"], "--config", cfg, "--out", str(tmp_path / "o")]) == 2
    assert "configuration error" in capsys.readouterr().err


def test_malformed_json_reports_line(tmp_path, capsys):
    p = tmp_path / "m.json"
    p.write_text('{"command": "solve",\n  "seed": }')
    assert run(["solve", "--config", str(p)]) == 2
    assert "line 2" in capsys.readouterr().err


def test_schema_error_names_field():
    with pytest.raises(ConfigError, match="field solver/max_iters"):
        validate({"solver": {"max_iters": 0}})


def test_yaml_and_json_equivalent():
    a = parse_text('{"seed": 3, "integrand": {"kind": "EuclideanNorm"}}', "a.json")
    b = parse_text("seed: 3\nintegrand:\n  kind: EuclideanNorm\n", "b.yaml")
    assert a == b


def test_custom_and_radial_integrands():
    g = build_integrand({"kind": "Custom", "expression": "abs(z1) + 2*abs(z2)"})
    assert g((1.0, -1.0)) == 3.0
    r = build_integrand({"kind": "RadialOfNorm", "profile": "sqrt(1 + r^2)"})
    assert r((3.0, 4.0)) == pytest.approx(26 ** 0.5)


def test_load_defaults_and_overrides():
    rc = load(None, command="verify", seed=9, checks=["convex_core"], grid=8)
    assert rc.seed == 9 and rc.checks == ["convex_core"] and rc.domain.h == 1 / 8


def test_verify_selected_checks_deterministic(tmp_path):
    outs = []
    for k in range(2):
        out = tmp_path / f"v{k}"
        assert run(["verify", "--check", "convex_core", "--check", "star_identities", "--seed", "4",
                    "--out", str(out)]) == 0
        outs.append((out / "report.json").read_bytes())
    assert outs[0] == outs[1]
    rep = json.loads(outs[0])
    jsonschema.validate(rep, REPORT_SCHEMA)
    assert [c["name"] for c in rep["checks"]] == ["convex_core", "star_identities"]
    assert "out_of_scope" in rep["coverage"]
