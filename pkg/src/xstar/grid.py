"""Structured grid domains, nodal grid functions and their file formats."""
import math
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .heis import lattice_steps

_TOL = 1e-12


@dataclass(frozen=True)
class Facets:
    """Boundary quadrature: one row per (node, unit normal, length weight).

    Built from the discrete flux vectors of the forward-difference stencil,
    so the bulk term and the boundary term obey an exact summation-by-parts
    identity.  Nodes that no cell difference depends on get no facet.
    """

    i: np.ndarray
    j: np.ndarray
    normal: np.ndarray
    weight: np.ndarray


@dataclass(frozen=True, eq=False)
class GridDomain:
    """Nodes x0 + i h, y0 + j h (arrays indexed [i, j]) masked to a planar domain.

    ``shape`` is one of "square", "disk", "polygon"; ``params`` holds the
    geometric data (vertices for polygons, center/radius for disks).
    """

    x0: float
    y0: float
    h: float
    nx: int
    ny: int
    inside: np.ndarray
    facets: Facets
    shape: str
    params: dict = field(default_factory=dict)

    # construction ---------------------------------------------------------

    @classmethod
    def square(cls, center=(0.5, 0.5), side=1.0, h=1 / 32):
        n = side / h
        if abs(n - round(n)) > 1e-9 * max(1.0, n) or round(n) < 2:
            raise DomainError("square side must be an integer multiple (>= 2) of h")
        cx, cy = map(float, center)
        s = 0.5 * side
        verts = [(cx - s, cy - s), (cx + s, cy - s), (cx + s, cy + s), (cx - s, cy + s)]
        return cls.polygon(verts, h, _shape="square", _extra={"center": (cx, cy), "side": float(side)})

    @classmethod
    def polygon(cls, vertices, h, _shape="polygon", _extra=None):
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3 or not np.all(np.isfinite(v)):
            raise DomainError("polygon needs at least 3 finite vertices")
        if not h > 0:
            raise DomainError("h must be positive")
        area2 = np.sum(v[:, 0] * np.roll(v[:, 1], -1) - np.roll(v[:, 0], -1) * v[:, 1])
        if area2 < 0:
            v = v[::-1]
        elif area2 == 0:
            raise DomainError("degenerate polygon")
        edges = np.roll(v, -1, axis=0) - v
        if np.any(edges[:, 0] * np.roll(edges[:, 1], -1) - edges[:, 1] * np.roll(edges[:, 0], -1) < -1e-12):
            raise DomainError("polygon must be convex")
        x0, y0 = v.min(axis=0)
        x1, y1 = v.max(axis=0)
        nx = int(math.floor((x1 - x0) / h + 1e-9)) + 1
        ny = int(math.floor((y1 - y0) / h + 1e-9)) + 1
        X, Y = _mesh(x0, y0, h, nx, ny)
        lens = np.hypot(edges[:, 0], edges[:, 1])
        normals = np.stack([edges[:, 1], -edges[:, 0]], axis=1) / lens[:, None]
        # signed distance outward to each edge line
        dist = (X[..., None] - v[:, 0]) * normals[:, 0] + (Y[..., None] - v[:, 1]) * normals[:, 1]
        tol = _TOL * max(1.0, float(np.abs(v).max()))
        inside = np.all(dist <= tol * 1e3, axis=-1)
        facets = _flux_facets(inside, h)
        params = {"vertices": [tuple(map(float, p)) for p in v]}
        params.update(_extra or {})
        return cls(float(x0), float(y0), float(h), nx, ny, inside, facets, _shape, params)

    @classmethod
    def disk(cls, center=(0.0, 0.0), radius=1.0, h=1 / 32):
        if not (radius > 0 and h > 0):
            raise DomainError("disk needs positive radius and h")
        cx, cy = map(float, center)
        R = float(radius)
        x0, y0 = cx - R, cy - R
        n = int(math.floor(2 * R / h + 1e-9)) + 1
        X, Y = _mesh(x0, y0, h, n, n)
        r = np.hypot(X - cx, Y - cy)
        inside = r <= R * (1 + 1e-12)
        facets = _flux_facets(inside, h)
        return cls(x0, y0, float(h), n, n, inside, facets, "disk", {"center": (cx, cy), "radius": R})

    # geometry ---------------------------------------------------------------

    @property
    def interior(self):
        return _interior(self.inside)

    @property
    def boundary(self):
        return self.inside & ~self.interior

    @property
    def cells(self):
        return _cells(self.inside)

    def coords(self):
        return _mesh(self.x0, self.y0, self.h, self.nx, self.ny)

    def cell_centers(self):
        X, Y = _mesh(self.x0 + 0.5 * self.h, self.y0 + 0.5 * self.h, self.h, self.nx - 1, self.ny - 1)
        return X, Y

    def area(self):
        return float(self.cells.sum()) * self.h ** 2

    def sup_norm_point(self):
        """sup |z| over the closed domain (exact for polygons and disks)."""
        if self.shape == "disk":
            c = self.params["center"]
            return math.hypot(*c) + self.params["radius"]
        return max(math.hypot(*p) for p in self.params["vertices"])

    def boundary_points(self, n=720):
        """Points sampled on the continuum boundary (for certificate checks)."""
        if self.shape == "disk":
            c, R = self.params["center"], self.params["radius"]
            t = 2 * math.pi * np.arange(n) / n
            return np.stack([c[0] + R * np.cos(t), c[1] + R * np.sin(t)], axis=1)
        v = np.asarray(self.params["vertices"])
        per = np.roll(v, -1, axis=0) - v
        lens = np.hypot(per[:, 0], per[:, 1])
        counts = np.maximum(1, np.round(n * lens / lens.sum()).astype(int))
        pts = [v[e] + per[e] * (np.arange(k) / k)[:, None] for e, k in enumerate(counts)]
        return np.concatenate(pts)

    def translate(self, tau):
        """The domain shifted by -tau (nodes z - tau), on the same index lattice."""
        tx, ty = (float(c) for c in tau)
        lattice_steps((tx, ty), self.h)
        params = dict(self.params)
        if "vertices" in params:
            params["vertices"] = [(x - tx, y - ty) for x, y in params["vertices"]]
        if "center" in params:
            cx, cy = params["center"]
            params["center"] = (cx - tx, cy - ty)
        return GridDomain(self.x0 - tx, self.y0 - ty, self.h, self.nx, self.ny, self.inside,
                          self.facets, self.shape, params)

    def same_lattice_as(self, other):
        return (self.nx == other.nx and self.ny == other.ny and self.h == other.h
                and abs(self.x0 - other.x0) <= 1e-9 * self.h and abs(self.y0 - other.y0) <= 1e-9 * self.h
                and np.array_equal(self.inside, other.inside))

    def sample(self, f):
        """GridFunction with values f(x, y) at in-domain nodes."""
        X, Y = self.coords()
        vals = np.asarray(f(X, Y), dtype=float) * np.ones_like(X)
        return GridFunction(self, np.where(self.inside, vals, np.nan))

    def zeros(self):
        return GridFunction(self, np.where(self.inside, 0.0, np.nan))

    def describe(self):
        d = {"shape": self.shape, "h": self.h, "nx": self.nx, "ny": self.ny}
        for k, v in self.params.items():
            d[k] = [list(p) for p in v] if k == "vertices" else (list(v) if isinstance(v, tuple) else v)
        return d


def _mesh(x0, y0, h, nx, ny):
    return np.meshgrid(x0 + h * np.arange(nx), y0 + h * np.arange(ny), indexing="ij")


def _cells(inside):
    return inside[:-1, :-1] & inside[1:, :-1] & inside[:-1, 1:] & inside[1:, 1:]


def flux_vectors(inside):
    """Per-node sum of d(h D_cell)/du_node over the cells containing the node.

    Summation by parts turns the bulk pairing into sum_k u_k <p, n_k>, so n_k
    is the discrete outward normal (times length / h) seen by the stencil.
    It vanishes at interior nodes.
    """
    c = _cells(inside).astype(float)
    n1 = np.zeros(inside.shape)
    n2 = np.zeros(inside.shape)
    n1[:-1, :-1] -= c
    n2[:-1, :-1] -= c
    n1[1:, :-1] += c
    n2[:-1, 1:] += c
    return n1, n2


def _flux_facets(inside, h):
    n1, n2 = flux_vectors(inside)
    length = np.hypot(n1, n2)
    bi, bj = np.nonzero(inside & ~_interior(inside) & (length > 0))
    ln = length[bi, bj]
    normal = np.stack([n1[bi, bj] / ln, n2[bi, bj] / ln], axis=1)
    return Facets(bi, bj, normal, h * ln)


def _interior(inside):
    """Nodes whose value enters every forward-difference edge they touch.

    That needs the cells anchored at (i, j), (i-1, j) and (i, j-1); this
    implies all four neighbours are in the domain.
    """
    c = _cells(inside)
    out = np.zeros_like(inside)
    out[1:-1, 1:-1] = c[1:, 1:] & c[:-1, 1:] & c[1:, :-1]
    return out


class GridFunction:
    """Nodal values on a GridDomain; exterior nodes hold NaN."""

    __slots__ = ("domain", "values")

    def __init__(self, domain, values):
        values = np.array(values, dtype=float)
        if values.shape != (domain.nx, domain.ny):
            raise DomainError(f"values shape {values.shape} does not match grid {(domain.nx, domain.ny)}")
        if not np.all(np.isfinite(values[domain.inside])):
            raise DomainError("grid function values must be finite on the domain")
        values[~domain.inside] = np.nan
        self.domain = domain
        self.values = values

    def trace(self):
        return self.values[self.domain.boundary]

    def with_values(self, values):
        return GridFunction(self.domain, values)

    def copy(self):
        return GridFunction(self.domain, self.values.copy())

    def sup_distance(self, other):
        _check_same(self, other)
        m = self.domain.inside
        return float(np.max(np.abs(self.values[m] - other.values[m])))

    def __add__(self, c):
        return GridFunction(self.domain, self.values + c)

    def __sub__(self, other):
        if isinstance(other, GridFunction):
            _check_same(self, other)
            other = other.values
        return GridFunction(self.domain, self.values - other)


def _check_same(u, v):
    if u.domain is not v.domain and not u.domain.same_lattice_as(v.domain):
        raise DomainError("grid functions live on different domains")


# file formats ---------------------------------------------------------------


def atomic_write(path, data):
    """Write bytes or text to ``path`` through a temporary file and rename."""
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data.encode() if isinstance(data, str) else data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def to_csv(u):
    d = u.domain
    lines = [f"nx,{d.nx}", f"ny,{d.ny}", f"h,{d.h:.17g}", f"x0,{d.x0:.17g}", f"y0,{d.y0:.17g}"]
    for j in range(d.ny):
        lines.append(",".join("nan" if math.isnan(x) else f"{x:.17g}" for x in u.values[:, j]))
    return "\n".join(lines) + "\n"


def write_csv(u, path):
    atomic_write(path, to_csv(u))


def read_csv(path, domain=None):
    """Read a CSV grid function.  Returns (header dict, values[i, j]) or a
    GridFunction when ``domain`` is given."""
    with open(path) as fh:
        rows = [ln.strip() for ln in fh if ln.strip()]
    head = {}
    for ln in rows[:5]:
        k, v = ln.split(",")
        head[k] = int(v) if k in ("nx", "ny") else float(v)
    vals = np.array([[float(x) for x in ln.split(",")] for ln in rows[5:]]).T
    if vals.shape != (head["nx"], head["ny"]):
        raise DomainError("CSV body does not match its header")
    if domain is None:
        return head, vals
    return GridFunction(domain, vals)


def to_pgm(u):
    v = u.values
    m = u.domain.inside
    lo, hi = float(np.min(v[m])), float(np.max(v[m]))
    scale = 255.0 / (hi - lo) if hi > lo else 0.0
    img = np.where(m, np.round((np.where(m, v, lo) - lo) * scale), 0).astype(np.uint8)
    img = img.T[::-1]  # rows top to bottom = y descending
    header = f"P5\n{img.shape[1]} {img.shape[0]}\n255\n".encode()
    return header + img.tobytes()


def write_pgm(u, path):
    atomic_write(path, to_pgm(u))
