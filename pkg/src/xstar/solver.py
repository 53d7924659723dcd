"""Minimizers of the discrete functional: pinned and relaxed boundary handling."""
import math
import time
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .convex import LINEAR, MoreauSmoothed
from .errors import ConfigError, UnsupportedOperation
from .functional import (FunctionalValue, Pinned, Relaxed, drift_cells, functional_value,
                         grad_adjoint, grad_cells, penalty_weights, phi_values)
from .grid import GridFunction

GRADIENT = "GradientDescentBacktracking"
PRIMAL_DUAL = "PrimalDual"
ALGORITHMS = (GRADIENT, PRIMAL_DUAL)
INITS = ("Zero", "BoundaryHarmonicExtension", "Seeded")

ARMIJO_C = 1e-4
SHRINK = 0.5
INITIAL_STEP = 1.0


@dataclass(frozen=True)
class SolveConfig:
    max_iters: int = 20000
    tol_rel: float = 1e-12
    algorithm: str = GRADIENT
    primal_step: float = None
    dual_step: float = None
    init: str = "BoundaryHarmonicExtension"
    seed: int = 0
    memory: int = 10

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}")
        if self.init not in INITS:
            raise ConfigError(f"unknown init {self.init!r}")
        if self.max_iters < 1 or not self.tol_rel > 0:
            raise ConfigError("max_iters must be >= 1 and tol_rel > 0")
        if self.memory < 0:
            raise ConfigError("memory must be >= 0")

    def replace(self, **kw):
        d = dict(self.__dict__)
        d.update(kw)
        return SolveConfig(**d)

    def to_dict(self):
        return dict(self.__dict__)


@dataclass
class SolveReport:
    minimizer: GridFunction
    value: FunctionalValue
    iterations: int
    converged: bool
    residual_history: list
    wall_time: float
    algorithm: str
    mode: str
    notes: list = field(default_factory=list)
    path_values: list = None

    def to_dict(self, include_history=False):
        d = {
            "value": self.value.as_dict(),
            "iterations": self.iterations,
            "converged": self.converged,
            "final_residual": self.residual_history[-1] if self.residual_history else None,
            "wall_time": self.wall_time,
            "algorithm": self.algorithm,
            "mode": self.mode,
            "notes": list(self.notes),
        }
        if self.path_values is not None:
            d["path_values"] = list(self.path_values)
        if include_history:
            d["residual_history"] = list(self.residual_history)
        return d


# initial guesses ---------------------------------------------------------------


def harmonic_extension(domain, phi, tol=1e-6, max_sweeps=20000):
    """Jacobi sweeps for the discrete Laplace equation with boundary values phi."""
    inner = domain.interior
    v = np.where(domain.inside, phi, 0.0)
    v[inner] = np.mean(phi[domain.boundary])
    scale = 1.0 + float(np.max(np.abs(phi[domain.boundary])))
    for _ in range(max_sweeps):
        avg = np.zeros_like(v)
        avg[1:-1, 1:-1] = 0.25 * (v[2:, 1:-1] + v[:-2, 1:-1] + v[1:-1, 2:] + v[1:-1, :-2])
        change = float(np.max(np.abs(avg[inner] - v[inner]))) if inner.any() else 0.0
        v[inner] = avg[inner]
        if change <= tol * scale:
            break
    return v


def initial_values(domain, phi, config, init_values=None):
    if init_values is not None:
        v = np.array(init_values.values if isinstance(init_values, GridFunction) else init_values, dtype=float)
    elif config.init == "Zero":
        v = np.zeros((domain.nx, domain.ny))
    elif config.init == "Seeded":
        v = np.random.default_rng(config.seed).standard_normal((domain.nx, domain.ny))
    else:
        v = harmonic_extension(domain, phi)
    v = np.where(domain.inside, v, 0.0)
    v[domain.boundary] = phi[domain.boundary]
    return v


# smooth objective on free nodes -------------------------------------------------


class _Bulk:
    """h^2 * sum_cells g(D u + X*) as a function of the free nodal values."""

    def __init__(self, g, domain, base, free):
        self.g = g
        self.h = domain.h
        self.cells = domain.cells
        self.drift = drift_cells(domain)
        self.base = base
        self.free = free

    def embed(self, x, base=None):
        v = (self.base if base is None else base).copy()
        v[self.free] = x
        return v

    def embed_step(self, d):
        v = np.zeros_like(self.base)
        v[self.free] = d
        return v

    def z(self, x):
        return grad_cells(self.embed(x), self.h) + self.drift

    def value(self, x):
        return math.fsum(self.g.value(self.z(x)[self.cells]).tolist()) * self.h ** 2

    def increment(self, x, d):
        z = self.z(x)[self.cells]
        dz = grad_cells(self.embed_step(d), self.h)[self.cells]
        return math.fsum(self.g.increment(z, dz).tolist()) * self.h ** 2

    def grad(self, x):
        p = self.g.gradient(self.z(x))
        p[~self.cells] = 0.0
        return (self.h ** 2 * grad_adjoint(p, self.h))[self.free]


def _two_loop(q, S, Y):
    alphas = []
    for s, y, rho in reversed(list(zip(S, Y, (1.0 / (y @ s) for s, y in zip(S, Y))))):
        a = rho * (s @ q)
        alphas.append(a)
        q = q - a * y
    if S:
        q = q * ((S[-1] @ Y[-1]) / (Y[-1] @ Y[-1]))
    for (s, y), a in zip(zip(S, Y), reversed(alphas)):
        b = (y @ q) / (y @ s)
        q = q + s * (a - b)
    return q


def _descend(obj, x, config):
    """Quasi-Newton directions with Armijo backtracking; monotone by construction."""
    S, Y = deque(maxlen=config.memory), deque(maxlen=config.memory)
    gr = obj.grad(x)
    hist = []
    converged = False
    it = 0
    for it in range(1, config.max_iters + 1):
        d = -_two_loop(gr, S, Y) if config.memory else -gr
        slope = float(gr @ d)
        if not slope < 0:
            S.clear()
            Y.clear()
            d = -gr
            slope = float(gr @ d)
        if slope == 0.0:
            converged = True
            hist.append(0.0)
            break
        s = INITIAL_STEP
        inc = obj.increment(x, s * d)
        while inc > ARMIJO_C * s * slope:
            s *= SHRINK
            if s < 1e-30:
                break
            inc = obj.increment(x, s * d)
        if s < 1e-30:
            if S:
                S.clear()
                Y.clear()
                continue
            # no representable decrease along steepest descent: numerically stationary
            converged = True
            break
        assert inc <= 0.0, "objective increased"
        step = s * d
        x = x + step
        g_new = obj.grad(x)
        yk = g_new - gr
        sy = float(step @ yk)
        if sy > 1e-300 and config.memory:
            S.append(step)
            Y.append(yk)
        gr = g_new
        change = float(np.max(np.abs(step))) / (1.0 + float(np.max(np.abs(x))))
        hist.append(change)
        if change <= config.tol_rel:
            converged = True
            break
    return x, it, converged, hist


# primal-dual --------------------------------------------------------------------


def _pd_steps(domain, config):
    h = domain.h
    tau = config.primal_step if config.primal_step is not None else h / (2 * math.sqrt(2))
    sigma = config.dual_step if config.dual_step is not None else h / (2 * math.sqrt(2))
    if not (tau > 0 and sigma > 0):
        raise ConfigError("primal and dual steps must be positive")
    if tau * sigma * 8.0 / h ** 2 > 1.0 + 1e-12:
        raise ConfigError(f"step sizes violate tau*sigma*8/h^2 <= 1 (got {tau * sigma * 8 / h ** 2:.4g})")
    return tau, sigma


def _primal_dual(g, domain, v0, free, config, boundary_prox=None):
    """First-order primal-dual iteration for min_u F(D u) + G(u).

    F(w) = h^2 sum_cells g(w + X*); the dual prox comes from the primal prox
    through the Moreau identity.  ``boundary_prox`` handles the relaxed
    boundary penalty on free boundary nodes (G = 0 otherwise).
    """
    h = domain.h
    tau, sigma = _pd_steps(domain, config)
    cells = domain.cells
    drift = drift_cells(domain)
    lam = h ** 2 / sigma
    x = v0.copy()
    xbar = x.copy()
    y = np.zeros(drift.shape)
    hist = []
    converged = False
    it = 0
    for it in range(1, config.max_iters + 1):
        w = y + sigma * grad_cells(xbar, h)
        inner = w / sigma + drift
        y_new = w - sigma * (g.prox(lam, inner) - drift)
        y_new[~cells] = 0.0
        x_new = x.copy()
        x_new[free] = x[free] - tau * grad_adjoint(y_new, h)[free]
        if boundary_prox is not None:
            x_new = boundary_prox(x_new, tau)
        dx = x_new - x
        dy = y_new - y
        primal_res = float(np.max(np.abs(dx / tau - grad_adjoint(dy, h))[free]))
        dual_res = float(np.max(np.abs(dy / sigma - grad_cells(dx, h))[cells])) if cells.any() else 0.0
        xbar = 2 * x_new - x
        x, y = x_new, y_new
        scale = 1.0 + float(np.max(np.abs(grad_adjoint(y, h)[free]))) if free.any() else 1.0
        res = max(primal_res, dual_res) * h / scale
        hist.append(res)
        if res <= config.tol_rel:
            converged = True
            break
    return x, it, converged, hist


# proximal gradient for the relaxed problem ----------------------------------------


def _penalty_prox(phi, alpha, beta, bnodes):
    def prox(v, t):
        out = v.copy()
        vb, pb = v[bnodes], phi[bnodes]
        ta, tb = t * alpha[bnodes], t * beta[bnodes]
        out[bnodes] = np.where(vb < pb - ta, vb + ta, np.where(vb > pb + tb, vb - tb, pb))
        return out
    return prox


def _penalty_nodes(v, phi, alpha, beta, bnodes):
    m = phi[bnodes] - v[bnodes]
    return math.fsum((alpha[bnodes] * np.maximum(m, 0) + beta[bnodes] * np.maximum(-m, 0)).tolist())


def _mfista(obj, v0, phi, alpha, beta, bnodes, config):
    """Monotone accelerated proximal gradient with backtracking on the step."""
    free = obj.free
    prox = _penalty_prox(phi, alpha, beta, bnodes)

    def total(v):
        return obj.value(v[free]) + _penalty_nodes(v, phi, alpha, beta, bnodes)

    x = v0.copy()
    fx = total(x)
    yv = x.copy()
    t = 1.0
    L = 1.0
    hist = []
    converged = False
    it = 0
    for it in range(1, config.max_iters + 1):
        gy = np.zeros_like(yv)
        gy[free] = obj.grad(yv[free])
        fy = obj.value(yv[free])
        while True:
            z = prox(yv - gy / L, 1.0 / L)
            d = (z - yv)[free]
            # smooth-part sufficient decrease via the stable increment
            if obj.increment(yv[free], d) <= float(gy[free] @ d) + 0.5 * L * float(d @ d) + 1e-15 * abs(fy):
                break
            L *= 2.0
        fz = total(z)
        # prox-gradient mapping residual at the extrapolated point
        change = float(np.max(np.abs((z - yv)[free]))) / (1.0 + float(np.max(np.abs(z[free]))))
        t_new = 0.5 * (1 + math.sqrt(1 + 4 * t * t))
        if fz <= fx:
            yv = z + ((t - 1) / t_new) * (z - x)
            x, fx = z, fz
        else:
            # restart momentum when the accelerated point fails to improve
            t_new = 1.0
            yv = x.copy()
        t = t_new
        L = max(L * 0.9, 1e-12)
        hist.append(change)
        if change <= config.tol_rel:
            converged = True
            break
    return x, it, converged, hist


# public entry points ------------------------------------------------------------


def _finish(g, domain, v, phi_arr, mode, it, converged, hist, t0, algorithm, notes=None):
    u = GridFunction(domain, np.where(domain.inside, v, np.nan))
    phi_fn = GridFunction(domain, np.where(domain.inside, phi_arr, np.nan))
    value = functional_value(g, u, Pinned(phi_fn) if mode == "pinned" else Relaxed(phi_fn))
    return SolveReport(u, value, it, converged, hist, time.perf_counter() - t0, algorithm, mode,
                       list(notes or []))


def solve(g, domain, phi, config=SolveConfig(), init_values=None):
    """Minimize the pinned discrete functional with boundary nodes fixed to phi."""
    t0 = time.perf_counter()
    phi_arr = phi_values(phi, domain)
    v0 = initial_values(domain, phi_arr, config, init_values)
    free = domain.interior
    if config.algorithm == GRADIENT:
        if not g.smooth:
            raise ConfigError(f"{config.algorithm} needs a differentiable integrand; got {g.kind}")
        obj = _Bulk(g, domain, v0, free)
        x, it, conv, hist = _descend(obj, v0[free], config)
        v = obj.embed(x)
    else:
        v, it, conv, hist = _primal_dual(g, domain, v0, free, config)
    v[domain.boundary] = phi_arr[domain.boundary]
    return _finish(g, domain, v, phi_arr, "pinned", it, conv, hist, t0, config.algorithm)


def boundary_kkt_violation(g, domain, values, alpha, beta):
    """Largest violation of -beta_k <= F_k <= alpha_k at boundary nodes, where
    F_k is the bulk derivative with respect to u_k (requires gradient of g).

    When it is zero at a pinned stationary point, that point also minimizes
    the relaxed problem: the boundary penalty's subdifferential at zero
    mismatch is exactly [-alpha_k, beta_k].
    """
    h = domain.h
    v = np.where(domain.inside, values, 0.0)
    p = g.gradient(grad_cells(v, h) + drift_cells(domain))
    p[~domain.cells] = 0.0
    F = h * h * grad_adjoint(p, h)
    b = domain.boundary
    viol = np.maximum(np.maximum(F[b] - alpha[b], -F[b] - beta[b]), 0.0)
    return float(viol.max()) if viol.size else 0.0


def solve_relaxed(g, domain, phi, config=SolveConfig(), init_values=None):
    """Minimize bulk plus recession-priced boundary mismatch; boundary nodes are free.

    Smooth integrands first solve the pinned problem and test the boundary
    optimality condition; if it holds the pinned minimizer is returned as a
    certified relaxed minimizer, otherwise accelerated proximal gradient runs
    from it.  Nonsmooth integrands use the primal-dual iteration.
    """
    if g.growth != LINEAR:
        raise UnsupportedOperation("relaxed problem needs a linear-growth integrand")
    t0 = time.perf_counter()
    phi_arr = phi_values(phi, domain)
    alpha, beta = penalty_weights(g, domain)
    bnodes = domain.boundary
    free = domain.inside
    notes = []
    if config.algorithm == GRADIENT and g.smooth:
        pinned = solve(g, domain, phi, config, init_values)
        v0 = np.where(domain.inside, pinned.minimizer.values, 0.0)
        kkt = boundary_kkt_violation(g, domain, v0, alpha, beta)
        tol = 1e-12 * domain.h * (1.0 + float(np.max(alpha[bnodes], initial=0.0)))
        if pinned.converged and kkt <= tol:
            notes.append("boundary optimality certified at the pinned minimizer")
            return _finish(g, domain, v0, phi_arr, "relaxed", pinned.iterations, True,
                           pinned.residual_history + [kkt], t0, "CertifiedPinned", notes)
        notes.append(f"boundary optimality violated by {kkt:.3e}; proximal gradient from pinned minimizer")
        obj = _Bulk(g, domain, v0, free)
        v, it, conv, hist = _mfista(obj, v0, phi_arr, alpha, beta, bnodes, config)
        it += pinned.iterations
        algo = "ProximalGradient"
    else:
        v0 = initial_values(domain, phi_arr, config, init_values)
        prox = _penalty_prox(phi_arr, alpha, beta, bnodes)
        v, it, conv, hist = _primal_dual(g, domain, v0, free, config.replace(algorithm=PRIMAL_DUAL), prox)
        algo = PRIMAL_DUAL
    return _finish(g, domain, v, phi_arr, "relaxed", it, conv, hist, t0, algo, notes)


def smoothed_path_solve(g, domain, phi, lambda_schedule, config=SolveConfig(), init_values=None):
    """Pinned solves for the Moreau envelopes g_lam along a decreasing schedule.

    Each stage starts from the previous minimizer.  The final stage report is
    returned with the stage values in ``path_values``; a note is added if they
    fail to be non-decreasing.
    """
    sched = [float(l) for l in lambda_schedule]
    if not sched or any(b >= a for a, b in zip(sched, sched[1:])) or sched[-1] <= 0:
        raise ConfigError("lambda schedule must be positive and strictly decreasing")
    t0 = time.perf_counter()
    values = []
    warm = init_values
    total_iters = 0
    conv = True
    hist = []
    rep = None
    stage_cfg = config.replace(tol_rel=max(config.tol_rel, 1e-8))
    for k, lam in enumerate(sched):
        cfg = config if k == len(sched) - 1 else stage_cfg
        rep = solve(MoreauSmoothed(g, lam), domain, phi, cfg, init_values=warm)
        warm = rep.minimizer
        values.append(rep.value.total)
        total_iters += rep.iterations
        conv = conv and rep.converged
        hist.extend(rep.residual_history)
    notes = []
    if any(b < a - 1e-10 * (1 + abs(a)) for a, b in zip(values, values[1:])):
        notes.append("stage values decreased along the smoothing path")
    out = SolveReport(rep.minimizer, rep.value, total_iters, conv, hist, time.perf_counter() - t0,
                      rep.algorithm, "pinned", notes, values)
    return out
