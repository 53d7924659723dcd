"""Run configuration: schema validation and construction of library objects."""
import json
from dataclasses import dataclass, field
from importlib import resources

import jsonschema
import numpy as np
import yaml

from .bsc import AffineFunction
from .convex import (LINEAR, SUPERLINEAR, AnisotropicNorm, Custom, EuclideanNorm, MinimalSurface, Quadratic,
                     RadialOfNorm)
from .errors import ConfigError
from .expr import Expression
from .grid import GridDomain
from .solver import SolveConfig
from .verify import DEFAULT_SCHEDULE

COMMANDS = ("solve", "solve-relaxed", "verify", "bsc", "sweep")
_GROWTH = {"Linear": LINEAR, "Superlinear": SUPERLINEAR}


def load_schema(name):
    return json.loads(resources.files("xstar").joinpath("schemas", name).read_text())


def parse_text(text, source="<config>"):
    """Parse JSON or YAML text; errors carry line and column."""
    stripped = text.lstrip()
    if stripped.startswith("{") or source.endswith(".json"):
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}, column {mark.column + 1}: " if mark else ""
        raise ConfigError(f"{source}: {where}{getattr(exc, 'problem', exc)}") from None
    return {} if data is None else data


def validate(data, source="<config>"):
    validator = jsonschema.Draft7Validator(load_schema("config.schema.json"))
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        lines = []
        for e in errors:
            path = "/".join(str(p) for p in e.absolute_path) or "<root>"
            lines.append(f"{source}: field {path}: {e.message}")
        raise ConfigError("\n".join(lines))
    return data


def build_integrand(spec):
    kind = spec.get("kind", "Quadratic")
    growth = _GROWTH.get(spec.get("growth"))
    if kind == "EuclideanNorm":
        return EuclideanNorm()
    if kind == "AnisotropicNorm":
        if "a" not in spec or "b" not in spec:
            raise ConfigError("field integrand: AnisotropicNorm needs a and b")
        return AnisotropicNorm(float(spec["a"]), float(spec["b"]))
    if kind == "Quadratic":
        return Quadratic()
    if kind == "MinimalSurface":
        return MinimalSurface()
    if kind == "RadialOfNorm":
        if "profile" not in spec:
            raise ConfigError("field integrand/profile: RadialOfNorm needs a profile expression in r")
        f = Expression(spec["profile"], ("r",))
        return RadialOfNorm(f, label=spec["profile"], growth=growth or LINEAR,
                            lipschitz_bound=spec.get("lipschitz_bound"))
    if "expression" not in spec:
        raise ConfigError("field integrand/expression: Custom needs an expression in z1, z2")
    e = Expression(spec["expression"], ("z1", "z2"))
    return Custom(lambda z: e(z[..., 0], z[..., 1]), growth=growth or LINEAR,
                  lipschitz_bound=spec.get("lipschitz_bound"), smooth=bool(spec.get("smooth", False)),
                  label=spec["expression"])


def build_domain(spec, grid=None):
    """Domain from a spec; ``grid`` overrides h with width/grid."""
    shape = spec.get("shape", "square")
    if shape == "square":
        side = float(spec.get("side", 1.0))
        h = side / grid if grid else float(spec.get("h", side / 32))
        return GridDomain.square(center=tuple(spec.get("center", (0.5, 0.5))), side=side, h=h)
    if shape == "disk":
        r = float(spec.get("radius", 1.0))
        h = 2 * r / grid if grid else float(spec.get("h", 1 / 32))
        return GridDomain.disk(center=tuple(spec.get("center", (0.0, 0.0))), radius=r, h=h)
    if "vertices" not in spec:
        raise ConfigError("field domain/vertices: polygon needs vertices")
    v = np.asarray(spec["vertices"], dtype=float)
    width = float(v[:, 0].max() - v[:, 0].min())
    h = width / grid if grid else float(spec.get("h", width / 32))
    return GridDomain.polygon(v, h)


def build_boundary(spec):
    if "affine" in spec:
        a = spec["affine"]
        return AffineFunction(tuple(map(float, a["a"])), float(a["b"]))
    return Expression(spec.get("expression", "x^2 - y^2"))


def build_solver(spec, seed=0):
    kw = {k: v for k, v in spec.items() if k != "lambda_schedule"}
    kw.setdefault("seed", seed)
    return SolveConfig(**kw)


@dataclass
class RunConfig:
    command: str
    integrand: object
    domain: GridDomain
    boundary: object
    solver: SolveConfig
    checks: list
    seed: int = 0
    heatmap: bool = False
    lambda_schedule: tuple = DEFAULT_SCHEDULE
    sweep_h: list = None
    sweep_lambda: list = None
    raw: dict = field(default_factory=dict)


DEFAULTS = {
    "integrand": {"kind": "Quadratic"},
    "domain": {"shape": "square", "center": [0.5, 0.5], "side": 1.0},
    "boundary": {"expression": "x^2 - y^2"},
}


def build(data, command=None, seed=None, checks=None, grid=None):
    """RunConfig from validated data, with command-line overrides applied."""
    data = dict(data or {})
    cmd = command or data.get("command")
    if cmd is None:
        raise ConfigError("no command given")
    if command and data.get("command") and data["command"] != command:
        raise ConfigError(f"field command: config says {data['command']!r} but {command!r} was requested")
    seed = int(data.get("seed", 0) if seed is None else seed)
    integrand = build_integrand(data.get("integrand", DEFAULTS["integrand"]))
    dom_spec = data.get("domain", DEFAULTS["domain"])
    domain = build_domain(dom_spec, grid)
    boundary = build_boundary(data.get("boundary", DEFAULTS["boundary"]))
    solver_spec = data.get("solver", {})
    solver = build_solver(solver_spec, seed)
    chk = checks or data.get("checks", "all")
    chk = ["all"] if chk == "all" else list(chk)
    sweep = data.get("sweep", {})
    if cmd == "sweep" and not sweep:
        raise ConfigError("field sweep: sweep needs an h or lambda list")
    schedule = tuple(solver_spec.get("lambda_schedule", DEFAULT_SCHEDULE))
    return RunConfig(cmd, integrand, domain, boundary, solver, chk, seed, bool(data.get("heatmap", False)),
                     schedule, sweep.get("h"), sweep.get("lambda"), data)


def load(path=None, command=None, seed=None, checks=None, grid=None):
    if path is None:
        data = {}
    else:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        data = parse_text(text, str(path))
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top level must be a mapping")
    validate(data, str(path or "<defaults>"))
    return build(data, command, seed, checks, grid)
