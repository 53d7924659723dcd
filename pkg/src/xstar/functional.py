"""Discrete gradient and the pinned / relaxed discrete functionals."""
import math
from dataclasses import dataclass

import numpy as np

from .convex import LINEAR, recession
from .errors import DomainError, UnsupportedOperation
from .grid import GridFunction, _check_same
from .heis import xstar


@dataclass(frozen=True)
class Pinned:
    phi: object


@dataclass(frozen=True)
class Relaxed:
    phi: object


@dataclass(frozen=True)
class FunctionalValue:
    total: float
    bulk: float
    boundary_penalty: float = 0.0

    def as_dict(self):
        return {"total": self.total, "bulk": self.bulk, "boundary_penalty": self.boundary_penalty}


def grad_cells(values, h):
    """Forward differences anchored at each cell's lower-left node, shape (nx-1, ny-1, 2)."""
    v = values
    d1 = (v[1:, :-1] - v[:-1, :-1]) / h
    d2 = (v[:-1, 1:] - v[:-1, :-1]) / h
    return np.stack([d1, d2], axis=-1)


def grad_adjoint(p, h):
    """Adjoint of :func:`grad_cells`: returns the nodal array D^T p."""
    nx, ny = p.shape[0] + 1, p.shape[1] + 1
    out = np.zeros((nx, ny))
    p1, p2 = p[..., 0] / h, p[..., 1] / h
    out[1:, :-1] += p1
    out[:-1, :-1] -= p1 + p2
    out[:-1, 1:] += p2
    return out


def drift_cells(domain):
    """X* at cell centres, shape (nx-1, ny-1, 2)."""
    X, Y = domain.cell_centers()
    return xstar(np.stack([X, Y], axis=-1))


def discrete_gradient(u, cell=None):
    """Forward-difference gradient of a GridFunction.

    With ``cell=(i, j)`` returns the 2-vector for that cell (DomainError if a
    corner lies outside the domain); otherwise the full cell array with NaN on
    cells that touch the exterior.
    """
    d = u.domain
    if cell is not None:
        i, j = cell
        if not (0 <= i < d.nx - 1 and 0 <= j < d.ny - 1 and d.cells[i, j]):
            raise DomainError(f"cell {cell} touches the exterior")
        return grad_cells(u.values[i:i + 2, j:j + 2], d.h)[0, 0]
    G = grad_cells(u.values, d.h)
    G[~d.cells] = np.nan
    return G


def phi_values(phi, domain):
    """Nodal array of a boundary datum given as GridFunction, callable or array."""
    if isinstance(phi, GridFunction):
        _check_same(phi, GridFunction(domain, np.where(domain.inside, 0.0, np.nan)))
        return phi.values
    if callable(phi):
        return domain.sample(phi).values
    arr = np.asarray(phi, dtype=float)
    if arr.shape != (domain.nx, domain.ny):
        raise DomainError("boundary datum has the wrong shape")
    return arr


def bulk_value(g, values, domain, drift=None):
    if drift is None:
        drift = drift_cells(domain)
    z = grad_cells(values, domain.h) + drift
    m = domain.cells
    return math.fsum(g.value(z[m]).tolist()) * domain.h ** 2


def recession_values(g, p):
    r = g.recession_direction(p)
    return r if r is not None else np.asarray(recession(g, p))


def penalty_value(g, values, phi_vals, domain):
    f = domain.facets
    m = phi_vals[f.i, f.j] - values[f.i, f.j]
    terms = recession_values(g, m[:, None] * f.normal) * f.weight
    return math.fsum(terms.tolist())


def penalty_weights(g, domain):
    """Per-node (alpha, beta) with penalty = sum alpha*(phi-u)_+ + beta*(phi-u)_-."""
    f = domain.facets
    alpha = np.zeros((domain.nx, domain.ny))
    beta = np.zeros((domain.nx, domain.ny))
    np.add.at(alpha, (f.i, f.j), f.weight * recession_values(g, f.normal))
    np.add.at(beta, (f.i, f.j), f.weight * recession_values(g, -f.normal))
    return alpha, beta


def functional_value(g, u, mode):
    """Discrete functional of ``u``: bulk quadrature plus, in relaxed mode,
    the recession-priced boundary mismatch."""
    d = u.domain
    phi = phi_values(mode.phi, d)
    if isinstance(mode, Pinned):
        b = d.boundary
        mis = np.abs(u.values[b] - phi[b])
        if np.any(mis > 1e-12 * (1.0 + np.abs(phi[b]))):
            raise DomainError(f"pinned mode: boundary mismatch {mis.max():.3e}")
        bulk = bulk_value(g, u.values, d)
        return FunctionalValue(bulk, bulk, 0.0)
    if isinstance(mode, Relaxed):
        if g.growth != LINEAR:
            raise UnsupportedOperation("relaxed functional needs a linear-growth integrand")
        bulk = bulk_value(g, u.values, d)
        pen = penalty_value(g, u.values, phi, d)
        return FunctionalValue(bulk + pen, bulk, pen)
    raise DomainError(f"unknown mode {mode!r}")


def lattice_max(u, v):
    _check_same(u, v)
    return GridFunction(u.domain, np.maximum(u.values, v.values))


def lattice_min(u, v):
    _check_same(u, v)
    return GridFunction(u.domain, np.minimum(u.values, v.values))


NEIGHBORS = "neighbors"
ALL_PAIRS = "all_pairs"


def discrete_lipschitz(u, scope=NEIGHBORS, chunk=512):
    """Largest difference quotient over grid edges or over all node pairs."""
    d = u.domain
    v = u.values
    m = d.inside
    if scope == NEIGHBORS:
        best = 0.0
        for a, b, ma, mb in ((v[1:], v[:-1], m[1:], m[:-1]), (v[:, 1:], v[:, :-1], m[:, 1:], m[:, :-1])):
            ok = ma & mb
            if ok.any():
                best = max(best, float(np.max(np.abs(a[ok] - b[ok]))) / d.h)
        return best
    if scope != ALL_PAIRS:
        raise DomainError(f"unknown scope {scope!r}")
    X, Y = d.coords()
    xs, ys, vs = X[m], Y[m], v[m]
    best = 0.0
    for s in range(0, vs.size, chunk):
        dx = xs[s:s + chunk, None] - xs[None, :]
        dy = ys[s:s + chunk, None] - ys[None, :]
        dist = np.hypot(dx, dy)
        dv = np.abs(vs[s:s + chunk, None] - vs[None, :])
        with np.errstate(invalid="ignore", divide="ignore"):
            q = np.where(dist > 0, dv / dist, 0.0)
        best = max(best, float(q.max()))
    return best
