"""Bounded slope condition: affine supports, certificates, barriers, Lipschitz constants."""
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class AffineFunction:
    """L(z) = <a, z> + b."""

    slope: tuple
    offset: float

    def __post_init__(self):
        object.__setattr__(self, "slope", tuple(float(c) for c in self.slope))
        object.__setattr__(self, "offset", float(self.offset))

    def __call__(self, x, y):
        return self.slope[0] * np.asarray(x, dtype=float) + self.slope[1] * np.asarray(y, dtype=float) + self.offset

    @property
    def lipschitz(self):
        return math.hypot(*self.slope)


@dataclass(frozen=True)
class BSCCertificate:
    Q: float
    anchors: np.ndarray
    lower_slopes: np.ndarray
    lower_offsets: np.ndarray
    upper_slopes: np.ndarray
    upper_offsets: np.ndarray

    def lower_supports(self):
        return [AffineFunction(a, b) for a, b in zip(self.lower_slopes, self.lower_offsets)]

    def upper_supports(self):
        return [AffineFunction(a, b) for a, b in zip(self.upper_slopes, self.upper_offsets)]

    def to_dict(self):
        return {
            "Q": self.Q,
            "anchors": self.anchors.tolist(),
            "lower_slopes": self.lower_slopes.tolist(),
            "lower_offsets": self.lower_offsets.tolist(),
            "upper_slopes": self.upper_slopes.tolist(),
            "upper_offsets": self.upper_offsets.tolist(),
        }


@dataclass(frozen=True)
class CertificationFailure:
    """No support with slope <= Q_max exists at the listed anchors."""

    failed_anchors: list
    Q_max: float

    passed = False


def _phi_at(phi, pts):
    return np.asarray(phi(pts[:, 0], pts[:, 1]), dtype=float) * np.ones(len(pts))


def certify_affine(L, domain=None, boundary_samples=None, n_samples=720):
    """Certificate for affine data: every support is L itself."""
    if boundary_samples is None:
        boundary_samples = domain.boundary_points(n_samples)
    pts = np.asarray(boundary_samples, dtype=float)
    a = np.repeat(np.array([L.slope]), len(pts), axis=0)
    b = np.full(len(pts), L.offset)
    return BSCCertificate(L.lipschitz, pts, a, b, a.copy(), b.copy())


def min_norm_feasible(D, c, rng, slack=0.0):
    """Minimum-norm a in R^2 with <a, D_k> <= c_k + slack_k for all k, or None.

    Randomized incremental algorithm: constraints are inserted in random
    order; when the current optimum violates a new constraint, the optimum
    moves onto that constraint's line and a one-dimensional problem over the
    already-inserted constraints is solved exactly.
    """
    D = np.asarray(D, dtype=float)
    c = np.asarray(c, dtype=float) + slack
    keep = np.hypot(D[:, 0], D[:, 1]) > 0
    if np.any(~keep & (c < 0)):
        return None
    D, c = D[keep], c[keep]
    order = rng.permutation(len(c))
    D, c = D[order], c[order]
    a = np.zeros(2)
    k = 0
    n = len(c)
    while k < n:
        viol = np.flatnonzero(D[k:] @ a > c[k:])
        if viol.size == 0:
            break
        k += int(viol[0])
        d, ck = D[k], c[k]
        nn = d @ d
        p = d * (ck / nn)  # closest point of the line to the origin
        e = np.array([-d[1], d[0]]) / math.sqrt(nn)
        lo, hi = -math.inf, math.inf
        if k:
            s = D[:k] @ e
            r = c[:k] - D[:k] @ p
            tiny = 1e-14 * np.hypot(D[:k, 0], D[:k, 1])
            pos, neg = s > tiny, s < -tiny
            if pos.any():
                hi = float(np.min(r[pos] / s[pos]))
            if neg.any():
                lo = float(np.max(r[neg] / s[neg]))
            par = ~(pos | neg)
            eps = 1e-12 * (1.0 + abs(lo) + abs(hi) if math.isfinite(lo + hi) else 1.0)
            if np.any(r[par] < -1e-12) or lo > hi + eps:
                return None
        t = 0.5 * (lo + hi) if lo > hi else min(max(0.0, lo), hi)
        a = p + t * e
        k += 1
    return a


def construct_supports(phi, domain=None, anchors=None, Q_max=math.inf, boundary_samples=None,
                       n_samples=720, seed=0, slack=1e-13):
    """Build lower/upper affine supports of ``phi`` at every anchor.

    Each support touches phi at its anchor and stays below (above) phi at all
    boundary samples; its slope is the one of least norm.  Returns a
    :class:`BSCCertificate`, or :class:`CertificationFailure` when some anchor
    admits no support with slope norm <= Q_max.
    """
    if boundary_samples is None:
        boundary_samples = domain.boundary_points(n_samples)
    pts = np.asarray(boundary_samples, dtype=float)
    anc = pts if anchors is None else np.asarray(anchors, dtype=float)
    fp = _phi_at(phi, pts)
    fa = _phi_at(phi, anc)
    rng = np.random.default_rng(seed)
    lower, upper, failed = [], [], []
    for z0, f0 in zip(anc, fa):
        D = pts - z0
        c = fp - f0
        sl = slack * (1.0 + np.abs(fp))
        lo = min_norm_feasible(D, c, rng, sl)
        up = min_norm_feasible(-D, -c, rng, sl)
        if lo is None or up is None or math.hypot(*lo) > Q_max or math.hypot(*up) > Q_max:
            failed.append(tuple(z0))
            continue
        lower.append(lo)
        upper.append(up)
    if failed:
        return CertificationFailure(failed, Q_max)
    lower = np.array(lower)
    upper = np.array(upper)
    lo_off = fa - np.sum(lower * anc, axis=1)
    up_off = fa - np.sum(upper * anc, axis=1)
    Q = float(max(np.hypot(lower[:, 0], lower[:, 1]).max(), np.hypot(upper[:, 0], upper[:, 1]).max()))
    return BSCCertificate(Q, anc, lower, lo_off, upper, up_off)


@dataclass
class BSCVerification:
    passed: bool
    tol: float
    worst: dict = field(default_factory=dict)

    def to_dict(self):
        return {"passed": self.passed, "tol": self.tol, "worst": dict(self.worst)}


def verify_bsc(cert, phi, boundary_samples, tol=1e-9):
    """Check support ordering on samples, touching at anchors and slope bounds."""
    pts = np.asarray(boundary_samples, dtype=float)
    fp = _phi_at(phi, pts)
    fa = _phi_at(phi, cert.anchors)
    wl = cert.lower_slopes @ pts.T + cert.lower_offsets[:, None]
    wu = cert.upper_slopes @ pts.T + cert.upper_offsets[:, None]
    ordering = float(max(np.max(wl - fp[None, :]), np.max(fp[None, :] - wu), 0.0))
    al = np.sum(cert.lower_slopes * cert.anchors, axis=1) + cert.lower_offsets
    au = np.sum(cert.upper_slopes * cert.anchors, axis=1) + cert.upper_offsets
    touching = float(max(np.max(np.abs(al - fa)), np.max(np.abs(au - fa))))
    slopes = np.concatenate([cert.lower_slopes, cert.upper_slopes])
    slope_excess = float(max(np.max(np.hypot(slopes[:, 0], slopes[:, 1])) - cert.Q, 0.0))
    worst = {"ordering": ordering, "touching": touching, "slope_bound": slope_excess}
    return BSCVerification(all(v <= tol for v in worst.values()), tol, worst)


def envelopes(cert):
    """(f1, f2): pointwise max of lower supports and min of upper supports."""
    if len(cert.anchors) == 0:
        raise DomainError("certificate has no anchors")

    def f1(x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        out = np.full(x.shape, -np.inf)
        for (a1, a2), b in zip(cert.lower_slopes, cert.lower_offsets):
            out = np.maximum(out, a1 * x + a2 * y + b)
        return out

    def f2(x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        out = np.full(x.shape, np.inf)
        for (a1, a2), b in zip(cert.upper_slopes, cert.upper_offsets):
            out = np.minimum(out, a1 * x + a2 * y + b)
        return out

    return f1, f2


@dataclass(frozen=True)
class LipschitzBound:
    Q: float
    sup_z: float
    M: float
    K: float


def lipschitz_bound(Q, domain):
    """M = Q + 2 sup|z| and K = M + 2 sup|z| over the closed domain."""
    s = domain.sup_norm_point()
    M = Q + 2.0 * s
    return LipschitzBound(float(Q), s, M, M + 2.0 * s)


def bsc_report(cert, verification, bound=None):
    d = {"certificate": cert.to_dict(), "verification": verification.to_dict()}
    if bound is not None:
        d["lipschitz"] = {"Q": bound.Q, "sup_z": bound.sup_z, "M": bound.M, "K": bound.K}
    return d
