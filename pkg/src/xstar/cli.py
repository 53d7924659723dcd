"""Command-line front end: ``xstar {solve,solve-relaxed,verify,bsc,sweep}``.

Configuration is JSON or YAML validated against ``schemas/config.schema.json``;
unknown keys are rejected.  Top-level keys:

``command``
    one of solve, solve-relaxed, verify, bsc, sweep (must match the subcommand).
``integrand``
    ``{"kind": "EuclideanNorm" | "AnisotropicNorm" | "Quadratic" | "MinimalSurface"
    | "RadialOfNorm" | "Custom", ...}``.  AnisotropicNorm takes ``a`` and ``b``;
    RadialOfNorm takes ``profile`` (expression in ``r``); Custom takes
    ``expression`` (in ``z1``, ``z2``) and optionally ``growth``
    (Linear/Superlinear), ``smooth`` and ``lipschitz_bound``.
``domain``
    ``{"shape": "square", "center", "side"}``, ``{"shape": "disk", "center",
    "radius"}`` or ``{"shape": "polygon", "vertices"}``, each with optional ``h``.
``boundary``
    ``{"affine": {"a": [a1, a2], "b": b}}`` or ``{"expression": "x^2 - y^2"}``
    using ``+ - * / ^``, parentheses, sin, cos, sqrt, abs.
``solver``
    max_iters, tol_rel, algorithm, primal_step, dual_step, init, memory and
    ``lambda_schedule`` (smoothing path for nonsmooth integrands).
``checks``
    ``"all"`` or a list of check names (verify only).
``sweep``
    ``{"h": [...]}`` or ``{"lambda": [...]}`` (sweep only).
``seed``, ``heatmap``
    RNG seed and whether to write heatmap.pgm.

Exit codes: 0 success/pass, 1 failure, 2 configuration error, 3 inconclusive only.
"""
import argparse
import csv
import io
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import config as cfgmod
from .bsc import AffineFunction, CertificationFailure, bsc_report, certify_affine, construct_supports, \
    lipschitz_bound, verify_bsc
from .convex import LINEAR, MoreauSmoothed
from .errors import ConfigError, DomainError, UnsupportedOperation, XStarError
from .functional import NEIGHBORS, Pinned, discrete_lipschitz, functional_value
from .grid import atomic_write, write_csv, write_pgm
from .solver import GRADIENT, solve, solve_relaxed
from .verify import COVERAGE, OUT_OF_SCOPE, run_checks, suite_status, thread_count

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_INCONCLUSIVE = 0, 1, 2, 3


def canonical_json(obj):
    """Deterministic serialization: sorted keys, fixed indentation, no timing fields."""
    return json.dumps(_strip(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


_VOLATILE = {"wall_time", "runtime", "generated_at"}


def _strip(obj):
    if isinstance(obj, dict):
        return {k: _strip(v) for k, v in obj.items() if k not in _VOLATILE}
    if isinstance(obj, (list, tuple)):
        return [_strip(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _config_echo(rc):
    return {
        "command": rc.command,
        "seed": rc.seed,
        "integrand": rc.integrand.to_config(),
        "domain": rc.domain.describe(),
        "boundary": _boundary_echo(rc.boundary),
        "solver": rc.solver.to_dict(),
    }


def _boundary_echo(b):
    if isinstance(b, AffineFunction):
        return {"affine": {"a": list(b.slope), "b": b.offset}}
    return {"expression": b.source}


def _solve_dispatch(rc, domain=None, schedule=None):
    g, domain = rc.integrand, domain or rc.domain
    if rc.command == "solve-relaxed":
        if g.growth != LINEAR:
            raise ConfigError("field integrand: solve-relaxed needs a linear-growth integrand")
        return solve_relaxed(g, domain, rc.boundary, rc.solver)
    if not g.smooth and rc.solver.algorithm == GRADIENT:
        from .solver import smoothed_path_solve
        return smoothed_path_solve(g, domain, rc.boundary, schedule or rc.lambda_schedule, rc.solver)
    return solve(g, domain, rc.boundary, rc.solver)


def cmd_solve(rc, out):
    rep = _solve_dispatch(rc)
    write_csv(rep.minimizer, out / "solution.csv")
    if rc.heatmap:
        write_pgm(rep.minimizer, out / "heatmap.pgm")
    status = EXIT_OK if rep.converged else EXIT_INCONCLUSIVE
    body = {"solve": rep.to_dict()}
    if rc.integrand.growth == LINEAR:
        body["solve"]["discrete_lipschitz"] = discrete_lipschitz(rep.minimizer, NEIGHBORS)
    return status, body


def cmd_verify(rc, out):
    reports = run_checks(rc.checks, seed=rc.seed)
    status = suite_status(reports)
    return status, {
        "checks": [r.to_dict() for r in reports],
        "coverage": {"checks": dict(COVERAGE), "out_of_scope": dict(OUT_OF_SCOPE)},
    }


def cmd_bsc(rc, out):
    phi, domain = rc.boundary, rc.domain
    samples = domain.boundary_points()
    if isinstance(phi, AffineFunction):
        cert = certify_affine(phi, boundary_samples=samples)
    else:
        cert = construct_supports(phi, boundary_samples=samples, seed=rc.seed)
    if isinstance(cert, CertificationFailure):
        return EXIT_FAIL, {"bsc": {"passed": False, "failed_anchors": [list(a) for a in cert.failed_anchors],
                                   "Q_max": cert.Q_max}}
    ver = verify_bsc(cert, phi, samples)
    body = bsc_report(cert, ver, lipschitz_bound(cert.Q, domain))
    body["passed"] = ver.passed
    return (EXIT_OK if ver.passed else EXIT_FAIL), {"bsc": body}


SWEEP_COLUMNS = ("h", "lambda", "functional_value", "sup_error", "lipschitz", "runtime")


def _monotone(values):
    v = [x for x in values if x is not None and math.isfinite(x)]
    if len(v) < 2:
        return "n/a"
    if all(b >= a for a, b in zip(v, v[1:])):
        return "non-decreasing"
    if all(b <= a for a, b in zip(v, v[1:])):
        return "non-increasing"
    return "none"


def _level(rc, h):
    spec = dict(rc.raw.get("domain", cfgmod.DEFAULTS["domain"]))
    spec["h"] = h
    domain = cfgmod.build_domain(spec)
    t0 = time.perf_counter()
    rep = _solve_dispatch(rc, domain)
    return domain, rep, time.perf_counter() - t0


def cmd_sweep(rc, out):
    rows = []
    converged = True
    if rc.sweep_h:
        hs = sorted(float(h) for h in rc.sweep_h)[::-1]
        with ThreadPoolExecutor(max_workers=min(thread_count(), len(hs))) as pool:
            levels = list(pool.map(lambda h: _level(rc, h), hs))
        ref = rc.boundary if isinstance(rc.boundary, AffineFunction) else None
        fine_domain, fine_rep, _ = levels[-1]
        for domain, rep, dt in levels:
            converged &= rep.converged
            if ref is not None:
                err = rep.minimizer.sup_distance(domain.sample(ref))
            else:
                err = _coarse_error(rep.minimizer, fine_rep.minimizer)
            rows.append({"h": domain.h, "lambda": None, "functional_value": rep.value.total,
                         "sup_error": err, "lipschitz": discrete_lipschitz(rep.minimizer, NEIGHBORS),
                         "runtime": dt})
    else:
        lams = sorted((float(x) for x in rc.sweep_lambda), reverse=True)
        warm = None
        reps = []
        for lam in lams:
            t0 = time.perf_counter()
            rep = solve(MoreauSmoothed(rc.integrand, lam), rc.domain, rc.boundary, rc.solver, init_values=warm)
            warm = rep.minimizer
            converged &= rep.converged
            reps.append((lam, rep, time.perf_counter() - t0))
        final = reps[-1][1].minimizer
        for lam, rep, dt in reps:
            rows.append({"h": rc.domain.h, "lambda": lam, "functional_value": rep.value.total,
                         "sup_error": rep.minimizer.sup_distance(final),
                         "lipschitz": discrete_lipschitz(rep.minimizer, NEIGHBORS), "runtime": dt})
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for r in rows:
        w.writerow(["" if r[c] is None else f"{r[c]:.17g}" for c in SWEEP_COLUMNS])
    atomic_write(out / "sweep.csv", buf.getvalue())
    flags = {c: _monotone([r[c] for r in rows]) for c in ("functional_value", "sup_error", "lipschitz")}
    table = [{k: v for k, v in r.items() if k != "runtime"} for r in rows]
    return (EXIT_OK if converged else EXIT_INCONCLUSIVE), {"sweep": {"rows": table, "monotone": flags}}


def _coarse_error(coarse, fine):
    """Sup distance at coarse nodes that are also fine nodes."""
    cd, fd = coarse.domain, fine.domain
    ratio = cd.h / fd.h
    k = int(round(ratio))
    if abs(ratio - k) > 1e-9 or abs(cd.x0 - fd.x0) > 1e-12 or abs(cd.y0 - fd.y0) > 1e-12:
        return float("nan")
    sub = fine.values[::k, ::k][:cd.nx, :cd.ny]
    m = cd.inside & np.isfinite(sub)
    return float(np.max(np.abs(coarse.values[m] - sub[m]))) if m.any() else 0.0


COMMAND_FUNCS = {"solve": cmd_solve, "solve-relaxed": cmd_solve, "verify": cmd_verify, "bsc": cmd_bsc,
                 "sweep": cmd_sweep}
STATUS_NAMES = {EXIT_OK: "pass", EXIT_FAIL: "fail", EXIT_INCONCLUSIVE: "inconclusive"}


def parser():
    p = argparse.ArgumentParser(prog="xstar", description="Minimize and verify drift-shifted convex functionals.")
    p.add_argument("command", choices=sorted(COMMAND_FUNCS))
    p.add_argument("--config", help="JSON or YAML run configuration")
    p.add_argument("--out", default="xstar-out", help="output directory (default: xstar-out)")
    p.add_argument("--seed", type=int, help="RNG seed (unsigned 64-bit)")
    p.add_argument("--check", action="append", help="check name for verify (repeatable)")
    p.add_argument("--grid", type=int, help="grid intervals across the domain width (sets h)")
    p.add_argument("--quiet", action="store_true", help="suppress the summary on stdout")
    return p


def main(argv=None):
    args = parser().parse_args(argv)
    out = Path(args.out)
    try:
        if args.seed is not None and not 0 <= args.seed < 2 ** 64:
            raise ConfigError("--seed must be an unsigned 64-bit integer")
        if args.grid is not None and args.grid < 2:
            raise ConfigError("--grid must be at least 2")
        rc = cfgmod.load(args.config, args.command, args.seed, args.check, args.grid)
        status, body = COMMAND_FUNCS[rc.command](rc, out)
    except (ConfigError, DomainError, UnsupportedOperation, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"xstar: configuration error: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    except XStarError as exc:
        print(f"xstar: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    report = {"config": _config_echo(rc), "status": STATUS_NAMES[status], "exit_code": status}
    report.update(body)
    atomic_write(out / "report.json", canonical_json(report))
    if not args.quiet:
        _summary(rc.command, status, body, out)
    return status


def _summary(command, status, body, out):
    if command == "verify":
        for c in body["checks"]:
            print(f"{c['status'].upper():13s} {c['name']:24s} worst_residual={c['worst_residual']:.3e}")
    elif "solve" in body:
        s = body["solve"]
        print(f"{command}: value={s['value']['total']:.12g} iterations={s['iterations']} "
              f"converged={s['converged']}")
    elif "bsc" in body:
        print(f"bsc: passed={body['bsc']['passed']} Q={body['bsc'].get('certificate', {}).get('Q', 'n/a')}")
    elif "sweep" in body:
        print(f"sweep: {len(body['sweep']['rows'])} levels, monotone {body['sweep']['monotone']}")
    print(f"status {STATUS_NAMES[status]}; outputs in {out}")


if __name__ == "__main__":
    sys.exit(main())
