"""Convex integrands g: R^2 -> R and the convex-analytic machinery around them.

Every integrand evaluates on arrays of points with trailing dimension 2 and
exposes a proximal map.  Smooth integrands also expose a gradient, and most
built-ins provide ``increment(p, d) = g(p + d) - g(p)`` in a cancellation-free
form so line searches stay meaningful close to a minimizer.
"""
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConvergenceError, DomainError, UnsupportedOperation

LINEAR = "linear"
SUPERLINEAR = "superlinear"

DEFAULT_LAMBDA_SCHEDULE = tuple(10.0 ** -k for k in range(0, 9))


def as_points(z):
    """Validate ``z`` as an array of planar points (trailing dimension 2)."""
    z = np.asarray(z, dtype=float)
    if z.ndim == 0 or z.shape[-1] != 2:
        raise DomainError(f"expected points with trailing dimension 2, got shape {z.shape}")
    if not np.all(np.isfinite(z)):
        raise DomainError("non-finite input")
    return z


def norm(z):
    return np.hypot(z[..., 0], z[..., 1])


def _scalar_or_array(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


def _norm_increment(p, d, weights=(1.0, 1.0), offset=0.0):
    """sqrt(offset + |p+d|_w^2) - sqrt(offset + |p|_w^2) without cancellation."""
    w1, w2 = weights
    q = p + d
    num = w1 * d[..., 0] * (2 * p[..., 0] + d[..., 0]) + w2 * d[..., 1] * (2 * p[..., 1] + d[..., 1])
    den = (np.sqrt(offset + w1 * q[..., 0] ** 2 + w2 * q[..., 1] ** 2)
           + np.sqrt(offset + w1 * p[..., 0] ** 2 + w2 * p[..., 1] ** 2))
    with np.errstate(invalid="ignore", divide="ignore"):
        out = num / den
    return np.where(den > 0, out, 0.0)


def _radial_solve(r, lam, df, ddf=None, df0=0.0, iters=200):
    """Solve s + lam*df(s) = r for s in [0, r] (r, lam broadcastable arrays).

    Safeguarded Newton with a bisection bracket; s = 0 where r <= lam*df(0+).
    """
    r = np.asarray(r, dtype=float)
    lam = np.broadcast_to(np.asarray(lam, dtype=float), r.shape)
    lo = np.zeros_like(r)
    hi = r.copy()
    s = r.copy()
    zero = r <= lam * df0
    for _ in range(iters):
        phi = s + lam * df(s) - r
        lo = np.where(phi < 0, s, lo)
        hi = np.where(phi > 0, s, hi)
        if ddf is not None:
            dphi = 1.0 + lam * ddf(s)
            cand = s - phi / dphi
        else:
            cand = 0.5 * (lo + hi)
        bad = ~((cand > lo) & (cand < hi))
        new = np.where(bad, 0.5 * (lo + hi), cand)
        done = np.abs(new - s) <= 1e-15 * (1.0 + r)
        s = new
        if np.all(done | zero):
            break
    return np.where(zero, 0.0, s)


class ConvexIntegrand:
    """Base class.  Subclasses set ``kind``, ``growth``, ``C``, ``lipschitz_bound``."""

    kind = "abstract"
    growth = LINEAR
    C: Optional[float] = None
    lipschitz_bound: Optional[float] = None
    smooth = False

    def value(self, z):
        raise NotImplementedError

    def __call__(self, z):
        return _scalar_or_array(self.value(as_points(z)))

    def gradient(self, z):
        raise UnsupportedOperation(f"{self.kind} has no gradient")

    def increment(self, p, d):
        return self.value(p + d) - self.value(p)

    def prox(self, lam, z):
        return _prox_inner(self, lam, z)

    def residual(self, lam, z):
        """z - J_lam(z); overridden where a cancellation-free form exists."""
        return z - self.prox(lam, z)

    def recession_direction(self, u):
        """g_inf on unit vectors when known in closed form, else None."""
        return None

    def to_config(self):
        return {"kind": self.kind}


@dataclass(frozen=True)
class EuclideanNorm(ConvexIntegrand):
    kind = "euclidean_norm"
    growth = LINEAR
    C = 1.0
    lipschitz_bound = 1.0

    def value(self, z):
        return norm(z)

    def gradient(self, z):
        r = norm(z)[..., None]
        with np.errstate(invalid="ignore", divide="ignore"):
            out = z / r
        return np.where(r > 0, out, 0.0)

    def increment(self, p, d):
        return _norm_increment(p, d)

    def prox(self, lam, z):
        r = norm(z)[..., None]
        lam = np.asarray(lam, dtype=float)[..., None] if np.ndim(lam) else lam
        with np.errstate(invalid="ignore", divide="ignore"):
            shrink = np.maximum(0.0, 1.0 - lam / r)
        return np.where(r > 0, shrink * z, 0.0)

    def residual(self, lam, z):
        r = norm(z)[..., None]
        lam = np.asarray(lam, dtype=float)[..., None] if np.ndim(lam) else lam
        with np.errstate(invalid="ignore", divide="ignore"):
            frac = np.minimum(1.0, lam / r)
        return np.where(r > 0, frac * z, 0.0)

    def recession_direction(self, u):
        return norm(u)


@dataclass(frozen=True)
class AnisotropicNorm(ConvexIntegrand):
    """g(z) = sqrt(z1^2/a^2 + z2^2/b^2)."""

    a: float = 1.0
    b: float = 1.0
    kind = "anisotropic_norm"
    growth = LINEAR

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0 and math.isfinite(self.a) and math.isfinite(self.b)):
            raise DomainError("anisotropic norm needs a > 0 and b > 0")

    @property
    def C(self):
        return max(1.0, self.a, self.b, 1.0 / self.a, 1.0 / self.b)

    @property
    def lipschitz_bound(self):
        return max(1.0 / self.a, 1.0 / self.b)

    @property
    def _w(self):
        return (1.0 / self.a ** 2, 1.0 / self.b ** 2)

    def value(self, z):
        w1, w2 = self._w
        return np.sqrt(w1 * z[..., 0] ** 2 + w2 * z[..., 1] ** 2)

    def gradient(self, z):
        w1, w2 = self._w
        g = self.value(z)[..., None]
        with np.errstate(invalid="ignore", divide="ignore"):
            out = np.stack([w1 * z[..., 0], w2 * z[..., 1]], axis=-1) / g
        return np.where(g > 0, out, 0.0)

    def increment(self, p, d):
        return _norm_increment(p, d, self._w)

    def _multiplier(self, lam, z):
        # Moreau decomposition: J = z - projection onto lam * (dual unit ball),
        # the dual ball being {a^2 p1^2 + b^2 p2^2 <= 1}.
        z = np.asarray(z, dtype=float)
        lam = np.broadcast_to(np.asarray(lam, dtype=float), z.shape[:-1])
        c1, c2 = self.a ** 2, self.b ** 2
        z1, z2 = z[..., 0], z[..., 1]
        inside = c1 * z1 ** 2 + c2 * z2 ** 2 <= lam ** 2
        mu = np.zeros_like(z1)
        for _ in range(200):
            d1 = 1.0 + mu * c1
            d2 = 1.0 + mu * c2
            psi = c1 * z1 ** 2 / d1 ** 2 + c2 * z2 ** 2 / d2 ** 2 - lam ** 2
            dpsi = -2 * c1 ** 2 * z1 ** 2 / d1 ** 3 - 2 * c2 ** 2 * z2 ** 2 / d2 ** 3
            with np.errstate(invalid="ignore", divide="ignore"):
                step = np.where(inside | (dpsi == 0), 0.0, psi / dpsi)
            mu = mu - step
            if np.all(np.abs(step) <= 1e-16 * (1.0 + mu)):
                break
        return mu, inside

    def prox(self, lam, z):
        z = np.asarray(z, dtype=float)
        mu, inside = self._multiplier(lam, z)
        c1, c2 = self.a ** 2, self.b ** 2
        out = np.stack([z[..., 0] * (mu * c1) / (1.0 + mu * c1), z[..., 1] * (mu * c2) / (1.0 + mu * c2)], axis=-1)
        return np.where(inside[..., None], 0.0, out)

    def residual(self, lam, z):
        z = np.asarray(z, dtype=float)
        mu, inside = self._multiplier(lam, z)
        c1, c2 = self.a ** 2, self.b ** 2
        out = np.stack([z[..., 0] / (1.0 + mu * c1), z[..., 1] / (1.0 + mu * c2)], axis=-1)
        return np.where(inside[..., None], z, out)

    def recession_direction(self, u):
        return self.value(u)

    def to_config(self):
        return {"kind": self.kind, "a": self.a, "b": self.b}


@dataclass(frozen=True)
class Quadratic(ConvexIntegrand):
    """g(z) = |z|^2."""

    kind = "quadratic"
    growth = SUPERLINEAR
    smooth = True

    def value(self, z):
        return z[..., 0] ** 2 + z[..., 1] ** 2

    def gradient(self, z):
        return 2.0 * z

    def increment(self, p, d):
        return d[..., 0] * (2 * p[..., 0] + d[..., 0]) + d[..., 1] * (2 * p[..., 1] + d[..., 1])

    def prox(self, lam, z):
        lam = np.asarray(lam, dtype=float)
        if lam.ndim:
            lam = lam[..., None]
        return np.asarray(z, dtype=float) / (1.0 + 2.0 * lam)


@dataclass(frozen=True)
class MinimalSurface(ConvexIntegrand):
    """g(z) = sqrt(1 + |z|^2)."""

    kind = "minimal_surface"
    growth = LINEAR
    C = 1.0
    lipschitz_bound = 1.0
    smooth = True

    def value(self, z):
        return np.sqrt(1.0 + z[..., 0] ** 2 + z[..., 1] ** 2)

    def gradient(self, z):
        return z / self.value(z)[..., None]

    def increment(self, p, d):
        return _norm_increment(p, d, offset=1.0)

    def prox(self, lam, z):
        z = np.asarray(z, dtype=float)
        r = norm(z)
        s = _radial_solve(
            r, lam,
            df=lambda s: s / np.sqrt(1.0 + s * s),
            ddf=lambda s: (1.0 + s * s) ** -1.5,
        )
        with np.errstate(invalid="ignore", divide="ignore"):
            scale = np.where(r > 0, s / r, 0.0)
        return z * scale[..., None]

    def recession_direction(self, u):
        return norm(u)


@dataclass(frozen=True)
class RadialOfNorm(ConvexIntegrand):
    """g(z) = f(|z|) for a convex nondecreasing profile f on [0, inf).

    ``df`` is the derivative of the profile; when omitted it is taken by
    central differences.  ``C`` is the linear growth constant if known.
    """

    f: Callable = field(compare=False)
    df: Optional[Callable] = field(default=None, compare=False)
    ddf: Optional[Callable] = field(default=None, compare=False)
    label: str = "f"
    growth: str = LINEAR
    C: Optional[float] = None
    lipschitz_bound: Optional[float] = None
    kind = "radial_of_norm"

    @property
    def smooth(self):
        return abs(float(self._df(np.array([0.0]))[0])) < 1e-12

    def _df(self, s):
        if self.df is not None:
            return np.asarray(self.df(s), dtype=float)
        s = np.asarray(s, dtype=float)
        eps = 1e-6 * (1.0 + np.abs(s))
        lo = np.maximum(s - eps, 0.0)
        return (np.asarray(self.f(s + eps)) - np.asarray(self.f(lo))) / (s + eps - lo)

    def value(self, z):
        return np.asarray(self.f(norm(z)), dtype=float) * np.ones(z.shape[:-1])

    def gradient(self, z):
        r = norm(z)
        with np.errstate(invalid="ignore", divide="ignore"):
            out = z * (self._df(r) / r)[..., None]
        return np.where((r > 0)[..., None], out, 0.0)

    def prox(self, lam, z):
        z = np.asarray(z, dtype=float)
        r = norm(z)
        df0 = float(self._df(np.array([0.0]))[0])
        s = _radial_solve(r, lam, df=self._df, ddf=self.ddf, df0=max(df0, 0.0))
        with np.errstate(invalid="ignore", divide="ignore"):
            scale = np.where(r > 0, s / r, 0.0)
        return z * scale[..., None]

    def to_config(self):
        return {"kind": self.kind, "profile": self.label, "growth": self.growth}


@dataclass(frozen=True)
class Custom(ConvexIntegrand):
    """User-supplied convex g.

    ``func`` must be vectorized over arrays of shape (..., 2).  Optional
    ``grad`` and ``prox_fn(lam, z)`` are used when present; otherwise the
    gradient is approximated by central differences (only when ``smooth``)
    and the prox is computed by the inner solver.
    """

    func: Callable = field(compare=False)
    grad: Optional[Callable] = field(default=None, compare=False)
    prox_fn: Optional[Callable] = field(default=None, compare=False)
    growth: str = LINEAR
    C: Optional[float] = None
    lipschitz_bound: Optional[float] = None
    smooth: bool = False
    label: str = "custom"
    kind = "custom"

    def value(self, z):
        return np.asarray(self.func(z), dtype=float) * np.ones(z.shape[:-1])

    def gradient(self, z):
        if self.grad is not None:
            return np.asarray(self.grad(z), dtype=float)
        if not self.smooth:
            raise UnsupportedOperation("custom integrand declared nonsmooth and has no gradient")
        return _numeric_gradient(self.value, z)

    def prox(self, lam, z):
        if self.prox_fn is not None:
            return np.asarray(self.prox_fn(lam, np.asarray(z, dtype=float)), dtype=float)
        return _prox_inner(self, lam, z)

    def to_config(self):
        return {"kind": self.kind, "expression": self.label, "growth": self.growth}


@dataclass(frozen=True)
class MoreauSmoothed(ConvexIntegrand):
    """The Moreau envelope g_lam of a base integrand, as an integrand."""

    base: ConvexIntegrand
    lam: float
    kind = "moreau"
    smooth = True

    def __post_init__(self):
        if not self.lam > 0:
            raise DomainError("lambda must be positive")

    @property
    def growth(self):
        return self.base.growth

    @property
    def C(self):
        return self.base.C

    @property
    def lipschitz_bound(self):
        return self.base.lipschitz_bound

    def value(self, z):
        if isinstance(self.base, EuclideanNorm):
            r = norm(z)
            return np.where(r >= self.lam, r - 0.5 * self.lam, r * r / (2.0 * self.lam))
        r = self.base.residual(self.lam, z)
        j = z - r
        return self.base.value(j) + (r[..., 0] ** 2 + r[..., 1] ** 2) / (2.0 * self.lam)

    def gradient(self, z):
        if isinstance(self.base, EuclideanNorm):
            return z / np.maximum(norm(z), self.lam)[..., None]
        return self.base.residual(self.lam, z) / self.lam

    def increment(self, p, d):
        if isinstance(self.base, EuclideanNorm):
            lam = self.lam
            q = p + d
            rp, rq = norm(p), norm(q)
            dn = _norm_increment(p, d)
            both_lin = (rp >= lam) & (rq >= lam)
            both_quad = (rp < lam) & (rq < lam)
            out = np.where(both_lin, dn, dn * (rp + rq) / (2 * lam))
            mixed = ~(both_lin | both_quad)
            if mixed.any():
                out[mixed] = self.value(q[mixed]) - self.value(p[mixed])
            return out
        return self.value(p + d) - self.value(p)

    def prox(self, mu, z):
        # prox of mu*g_lam: z + mu/(lam+mu) * (prox_{(lam+mu) g}(z) - z)
        z = np.asarray(z, dtype=float)
        mu = np.asarray(mu, dtype=float)
        t = mu + self.lam
        w = mu / t
        if np.ndim(w):
            w = w[..., None]
        return z + w * (self.base.prox(t, z) - z)

    def recession_direction(self, u):
        return self.base.recession_direction(u)

    def to_config(self):
        return {"kind": self.kind, "lambda": self.lam, "base": self.base.to_config()}


def _numeric_gradient(fun, z):
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    for k in range(2):
        e = np.zeros(2)
        e[k] = 1.0
        step = (1e-6 * (1.0 + np.abs(z[..., k])))[..., None]
        out[..., k] = (fun(z + step * e) - fun(z - step * e)) / (2 * step[..., 0])
    return out


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_DIRECTIONS = np.array([[1.0, 0.0], [0.0, 1.0], [math.sqrt(0.5), math.sqrt(0.5)],
                        [math.sqrt(0.5), -math.sqrt(0.5)]])


def _golden_line(phi, radius, tol):
    lo, hi = -radius, radius
    # widen until the minimizer is bracketed
    for _ in range(60):
        if phi(lo) > phi(0.5 * (lo + hi)) and phi(hi) > phi(0.5 * (lo + hi)):
            break
        lo, hi = 2 * lo, 2 * hi
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = phi(c), phi(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = phi(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = phi(d)
    return 0.5 * (a + b)


def _prox_point(g, lam, z, max_iter=10_000):
    """Prox of a single point for integrands without a closed form."""
    z = np.asarray(z, dtype=float)
    scale = 1.0 + float(np.hypot(*z))
    analytic = getattr(g, "grad", None) is not None or not isinstance(g, Custom)
    smooth = g.smooth or getattr(g, "grad", None) is not None
    if smooth:
        # central-difference gradients carry ~1e-10 noise, so only analytic ones reach 1e-12
        tol = (1e-12 if analytic else 1e-8) * scale
        y = z.copy()
        theta = 1.0
        res = math.inf
        for _ in range(max_iter):
            r = y - z + lam * g.gradient(y[None])[0]
            new_res = float(np.hypot(*r))
            if new_res <= tol:
                return y, new_res
            if new_res > res:
                theta *= 0.5
            res = new_res
            y = y - theta * r
        raise ConvergenceError(f"prox fixed-point iteration stalled at residual {res:.3e}", res)

    def obj(y):
        return float(g.value(y[None])[0]) + float(np.sum((y - z) ** 2)) / (2 * lam)

    # derivative-free: cyclic golden-section along axes and diagonals; the
    # attainable accuracy is limited by function-value resolution (~sqrt(eps)).
    tol = 1e-8 * scale
    y = z.copy()
    move = math.inf
    for _ in range(max_iter):
        move = 0.0
        for d in _DIRECTIONS:
            radius = max(float(np.hypot(*(y - z))) + lam * (g.lipschitz_bound or 1.0), 1e-12)
            t = _golden_line(lambda t: obj(y + t * d), radius, 1e-3 * tol)
            y = y + t * d
            move = max(move, abs(t))
        if move <= tol:
            return y, move
    raise ConvergenceError(f"prox coordinate search stalled at residual {move:.3e}", move)


def _prox_inner(g, lam, z):
    z = as_points(z)
    lam_arr = np.broadcast_to(np.asarray(lam, dtype=float), z.shape[:-1])
    flat = z.reshape(-1, 2)
    lam_flat = lam_arr.reshape(-1)
    out = np.empty_like(flat)
    for k in range(flat.shape[0]):
        out[k], _ = _prox_point(g, float(lam_flat[k]), flat[k])
    return out.reshape(z.shape)


# ---------------------------------------------------------------------------
# module-level operations


def evaluate(g, z):
    """g(z) for a point or an array of points."""
    return g(z)


@dataclass(frozen=True)
class RecessionEstimate:
    value: object
    schedule: tuple
    history: object
    monotone: object
    accepted: object


def recession_estimate(g, p, t_max=1e6, n_steps=None, shift=None):
    """Recession function g_inf(p) = lim g(t p)/t on a geometric schedule.

    Uses positive homogeneity, g_inf(p) = |p| g_inf(p/|p|), so the schedule is
    applied to unit directions.  ``shift`` evaluates g(t p + shift)/t instead.
    """
    if g.growth != LINEAR:
        raise UnsupportedOperation("recession function is +inf off the origin for superlinear g")
    if t_max < 1e3:
        raise DomainError("t_max must be at least 1e3")
    p = as_points(p)
    if n_steps is None:
        n_steps = int(round(math.log10(t_max)))
    ts = np.geomspace(10.0, t_max, max(int(n_steps), 2))
    r = norm(p)
    with np.errstate(invalid="ignore", divide="ignore"):
        u = np.where((r > 0)[..., None], p / r[..., None], 0.0)
    z = 0.0 if shift is None else as_points(shift)
    hist = np.stack([g.value(t * u + z) / t for t in ts], axis=0) * r
    hist = np.where(r > 0, hist, 0.0)
    diffs = np.diff(hist, axis=0)
    monotone = np.all(diffs <= 1e-15 * (1 + np.abs(hist[1:])), axis=0) | \
        np.all(diffs >= -1e-15 * (1 + np.abs(hist[1:])), axis=0)
    accepted = np.abs(hist[-1] - hist[-2]) < 1e-8 * (1.0 + r)
    return RecessionEstimate(_scalar_or_array(hist[-1]), tuple(ts), hist,
                             _scalar_or_array(monotone), _scalar_or_array(accepted))


def recession(g, p, t_max=1e6, n_steps=None, shift=None):
    """Approximate g_inf(p); see :func:`recession_estimate` for diagnostics."""
    return recession_estimate(g, p, t_max, n_steps, shift).value


def _check_lambda(lam):
    if not np.all(np.asarray(lam) > 0):
        raise DomainError("lambda must be positive")


def prox(g, lam, z):
    """Resolvent J_lam(z) = argmin_y |y - z|^2/(2 lam) + g(y)."""
    _check_lambda(lam)
    return _scalar_or_array(g.prox(lam, as_points(z)))


def moreau_envelope(g, lam, z):
    """g_lam(z) = g(J) + |z - J|^2/(2 lam)."""
    _check_lambda(lam)
    z = as_points(z)
    r = g.residual(lam, z)
    return _scalar_or_array(g.value(z - r) + (r[..., 0] ** 2 + r[..., 1] ** 2) / (2.0 * lam))


def yosida(g, lam, z):
    """A_lam(z) = (z - J_lam(z))/lam, an element of the subdifferential at J_lam(z)."""
    _check_lambda(lam)
    z = as_points(z)
    return _scalar_or_array(g.residual(lam, z) / lam)


@dataclass(frozen=True)
class SubgradientSelection:
    point: np.ndarray
    value: np.ndarray
    is_minimal_norm: bool
    lambda_used: float


def minimal_subgradient(g, z, lambda_schedule=DEFAULT_LAMBDA_SCHEDULE, cauchy_tol=1e-6):
    """Minimal-norm subgradient as the limit of Yosida approximations."""
    if g.growth != LINEAR:
        raise UnsupportedOperation("minimal subgradient bound needs linear growth")
    sched = [float(l) for l in lambda_schedule]
    if len(sched) < 2 or any(b >= a for a, b in zip(sched, sched[1:])) or sched[-1] > 1e-8:
        raise DomainError("schedule must be strictly decreasing and reach 1e-8")
    z = as_points(z)
    prev = None
    cur = None
    for lam in sched:
        prev, cur = cur, g.residual(lam, z) / lam
    gap = norm(cur - prev)
    worst = float(np.max(gap))
    if worst >= cauchy_tol:
        raise ConvergenceError(f"Yosida sequence not Cauchy (last gap {worst:.3e})", worst)
    return SubgradientSelection(point=z, value=cur, is_minimal_norm=True, lambda_used=sched[-1])


def _cross(x1, x2):
    """x1 . x2* with x2* = (-y, x); zero iff the vectors are parallel."""
    return -x1[..., 0] * x2[..., 1] + x1[..., 1] * x2[..., 0]


def collinear(x1, x2, tol):
    return np.abs(_cross(x1, x2)) <= tol * norm(x1) * norm(x2)


@dataclass
class ConditionReport:
    name: str
    n_pairs: int
    n_premise: int
    violations: list

    @property
    def passed(self):
        return not self.violations


def _pairs(sample_pairs):
    arr = np.asarray(sample_pairs, dtype=float)
    if arr.ndim != 3 or arr.shape[1:] != (2, 2) or arr.shape[0] == 0:
        raise DomainError("sample_pairs must have shape (n, 2, 2) with n > 0")
    return arr[:, 0, :], arr[:, 1, :]


def check_condition_A(g, sample_pairs, eq_tol=1e-12, collin_tol=1e-6):
    """Midpoint equality must force collinearity; returns the violating pairs."""
    x1, x2 = _pairs(sample_pairs)
    resid = g.value(0.5 * (x1 + x2)) - 0.5 * (g.value(x1) + g.value(x2))
    premise = np.abs(resid) <= eq_tol
    bad = premise & ~collinear(x1, x2, collin_tol)
    viol = [(x1[k].copy(), x2[k].copy()) for k in np.flatnonzero(bad)]
    return ConditionReport("A", len(x1), int(premise.sum()), viol)


def check_condition_B(g, sample_pairs, tol=1e-9, collin_tol=1e-6):
    """g_inf(xi1) = <p, xi1> with p the minimal subgradient at xi2 must force collinearity."""
    x1, x2 = _pairs(sample_pairs)
    p = minimal_subgradient(g, x2).value
    ginf = recession(g, x1)
    resid = ginf - np.sum(p * x1, axis=-1)
    premise = np.abs(resid) <= tol * (1.0 + norm(x1))
    bad = premise & ~collinear(x1, x2, collin_tol)
    viol = [(x1[k].copy(), x2[k].copy()) for k in np.flatnonzero(bad)]
    return ConditionReport("B", len(x1), int(premise.sum()), viol)


@dataclass(frozen=True)
class GrowthReport:
    C_estimate: float
    holds: bool


def growth_constants(g, sample_radius=10.0, n_samples=2000, seed=0):
    """Smallest C >= 1 with |z|/C <= g(z) <= C(1+|z|) on a sample set.

    Samples lie on geometric shells up to ``sample_radius`` and include the
    axis and diagonal directions.  ``holds`` is False when the upper ratio
    keeps growing with the radius (superlinear behaviour).
    """
    if n_samples < 100:
        raise DomainError("n_samples must be at least 100")
    rng = np.random.default_rng(seed)
    n_shell = 8
    per = max(n_samples // n_shell, 8)
    radii = sample_radius * 2.0 ** -np.arange(n_shell)[::-1]
    angles = np.concatenate([np.arange(8) * math.pi / 4, rng.uniform(0, 2 * math.pi, per - 8)])
    pts = np.stack([
        np.stack([r * np.cos(angles), r * np.sin(angles)], axis=-1) for r in radii
    ])
    vals = g.value(pts)
    rr = norm(pts)
    lower = np.max(rr / vals, axis=1)
    upper = np.max(vals / (1.0 + rr), axis=1)
    C = float(max(1.0, lower.max(), upper.max()))
    holds = bool(g.growth == LINEAR and upper[-1] <= 1.5 * upper[-2] + 1e-12)
    return GrowthReport(C, holds)
