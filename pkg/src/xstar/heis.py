"""Star operator, drift field X*(z) = 2 z*, and tilt transforms of grid functions."""
import math
from dataclasses import dataclass

import numpy as np

from .errors import AlignmentError, DomainError


@dataclass(frozen=True)
class PlanePoint:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise DomainError("plane point needs finite coordinates")

    def __iter__(self):
        yield self.x
        yield self.y

    def as_array(self):
        return np.array([self.x, self.y])


def _coords(z):
    if isinstance(z, PlanePoint):
        return np.array([z.x, z.y])
    return np.asarray(z, dtype=float)


def star(z):
    """Rotation by a quarter turn: (x, y) -> (-y, x).  Works on arrays (..., 2)."""
    if isinstance(z, PlanePoint):
        return PlanePoint(-z.y, z.x)
    z = _coords(z)
    return np.stack([-z[..., 1], z[..., 0]], axis=-1)


def xstar(z):
    """Drift field X*(z) = 2 z*."""
    if isinstance(z, PlanePoint):
        return PlanePoint(-2.0 * z.y, 2.0 * z.x)
    return 2.0 * star(z)


def dot_star(z1, z2):
    """z1 . z2* ; zero exactly when z1 and z2 are parallel."""
    z1, z2 = _coords(z1), _coords(z2)
    return -z1[..., 0] * z2[..., 1] + z1[..., 1] * z2[..., 0]


@dataclass(frozen=True)
class TiltTransform:
    """v(z) = u(z + tau) + 2 <tau*, z> + xi on the translated domain."""

    tau: PlanePoint
    xi: float = 0.0

    def __post_init__(self):
        if not isinstance(self.tau, PlanePoint):
            object.__setattr__(self, "tau", PlanePoint(*map(float, self.tau)))
        if not math.isfinite(self.xi):
            raise DomainError("xi must be finite")


def lattice_steps(tau, h, rtol=1e-9):
    """Integer grid steps of a translation, or AlignmentError."""
    out = []
    for c in tau:
        k = c / h
        r = round(k)
        if abs(k - r) > rtol * max(1.0, abs(k)):
            raise AlignmentError(f"translation component {c!r} is not a multiple of h={h!r}")
        out.append(int(r))
    return tuple(out)


def apply_tilt(u, t, target=None):
    """Tilt a grid function onto the translated domain.

    The target domain is the translate of ``u.domain`` by ``-tau``; it is
    constructed when not supplied, and checked for compatibility otherwise.
    Nodal values: v(z') = u(z' + tau) + 2 <tau*, z'> + xi, node by node.
    """
    from .grid import GridFunction

    dom = u.domain
    lattice_steps(t.tau, dom.h)
    if target is None:
        target = dom.translate(t.tau)
    elif not target.same_lattice_as(dom.translate(t.tau)):
        raise AlignmentError("target is not the translate of the source domain")
    X, Y = target.coords()
    tx, ty = t.tau.x, t.tau.y
    # <tau*, z> with tau* = (-ty, tx)
    vals = u.values + 2.0 * (-ty * X + tx * Y) + t.xi
    vals = np.where(target.inside, vals, np.nan)
    return GridFunction(target, vals)
