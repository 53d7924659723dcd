import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from xstar.convex import AnisotropicNorm, EuclideanNorm, MinimalSurface, Quadratic
from xstar.errors import DomainError, UnsupportedOperation
from xstar.functional import (ALL_PAIRS, NEIGHBORS, Pinned, Relaxed, discrete_gradient, discrete_lipschitz,
                              functional_value, grad_adjoint, grad_cells, lattice_max, lattice_min)
from xstar.grid import GridDomain, GridFunction


def test_discrete_gradient_examples():
    d = GridDomain.square(h=1 / 8)
    g = discrete_gradient(d.sample(lambda x, y: 0.7 * x - 1.3 * y + 2))
    np.testing.assert_allclose(g[d.cells], np.tile([0.7, -1.3], (d.cells.sum(), 1)), atol=1e-13)
    assert np.all(discrete_gradient(d.zeros() + 4.0)[d.cells] == 0.0)
    d = GridDomain.square(center=(0.5, 0.5), side=1.0, h=0.1)
    assert discrete_gradient(d.sample(lambda x, y: x * x), cell=(0, 0))[0] == pytest.approx(0.1, abs=1e-15)


def test_gradient_adjoint_identity():
    rng = np.random.default_rng(0)
    u = rng.normal(size=(9, 7))
    p = rng.normal(size=(8, 6, 2))
    h = 0.25
    assert np.sum(grad_cells(u, h) * p) == pytest.approx(np.sum(u * grad_adjoint(p, h)), abs=1e-12)


def test_quadratic_zero_converges_to_eight_thirds():
    d = GridDomain.square(h=1 / 64)
    v = functional_value(Quadratic(), d.zeros(), Pinned(d.zeros()))
    assert abs(v.bulk - 8 / 3) <= 2e-3
    # midpoint rule for a quadratic: error is exactly -h^2 * 4 * 2 / 12 * (1/1) ... verify convergence order 2
    e = [abs(functional_value(Quadratic(), dd.zeros(), Pinned(dd.zeros())).bulk - 8 / 3)
         for dd in (GridDomain.square(h=1 / 16), GridDomain.square(h=1 / 32))]
    assert e[0] / e[1] == pytest.approx(4.0, rel=1e-9)


def test_euclidean_zero_matches_closed_form_integral():
    # integral of 2|z| over [-1/2,1/2]^2 equals (sqrt(2) + asinh(1)) / 3
    exact = (math.sqrt(2) + math.asinh(1)) / 3
    errs = []
    for n in (64, 128, 256):
        d = GridDomain.square(center=(0, 0), side=1.0, h=1 / n)
        errs.append(abs(functional_value(EuclideanNorm(), d.zeros(), Pinned(d.zeros())).bulk - exact))
    assert errs[-1] < 1e-5
    assert 3.0 < errs[0] / errs[1] < 5.0 and 3.0 < errs[1] / errs[2] < 5.0


def test_pinned_requires_matching_boundary():
    d = GridDomain.square(h=1 / 8)
    with pytest.raises(DomainError):
        functional_value(Quadratic(), d.zeros(), Pinned(lambda x, y: x + 1.0))


def test_relaxed_requires_linear_growth():
    d = GridDomain.square(h=1 / 8)
    with pytest.raises(UnsupportedOperation):
        functional_value(Quadratic(), d.zeros(), Relaxed(d.zeros()))


def test_relaxed_penalty_zero_when_traces_match():
    d = GridDomain.disk(radius=1, h=1 / 16)
    u = d.sample(lambda x, y: x * x - y)
    for g in (EuclideanNorm(), AnisotropicNorm(1, 2), MinimalSurface()):
        assert functional_value(g, u, Relaxed(lambda x, y: x * x - y)).boundary_penalty == 0.0


def test_relaxed_penalty_approximates_boundary_integral():
    # u = 0, phi = x, g = |.|: the penalty approximates the boundary integral of |x| = 2 on the unit square
    vals = []
    for n in (16, 32, 64):
        d = GridDomain.square(h=1 / n)
        vals.append(functional_value(EuclideanNorm(), d.zeros(), Relaxed(lambda x, y: x)).boundary_penalty)
    errs = [abs(v - 2.0) for v in vals]
    assert errs[-1] <= 1 / 64 + 1e-12
    assert errs[0] > errs[1] > errs[2]


def test_lattice_examples():
    d = GridDomain.square(h=1 / 8)
    u = d.sample(lambda x, y: x - y)
    v = u + 1.0
    assert lattice_max(u, v).sup_distance(v) == 0 and lattice_min(u, v).sup_distance(u) == 0
    w = d.sample(lambda x, y: -(x - y))
    np.testing.assert_array_equal(lattice_max(u, w).values[d.inside], np.abs(u.values)[d.inside])
    np.testing.assert_array_equal(lattice_min(u, w).values[d.inside], -np.abs(u.values)[d.inside])


def test_lipschitz_examples():
    d = GridDomain.square(h=1 / 16)
    a = (0.6, -0.8)
    u = d.sample(lambda x, y: a[0] * x + a[1] * y)
    assert discrete_lipschitz(u, NEIGHBORS) == pytest.approx(0.8, abs=1e-12)
    assert discrete_lipschitz(u, ALL_PAIRS) == pytest.approx(1.0, abs=1e-12)
    assert discrete_lipschitz(d.zeros() + 3.0, ALL_PAIRS) == 0.0
    x = d.sample(lambda x, y: x)
    assert discrete_lipschitz(x, NEIGHBORS) == pytest.approx(1.0, abs=1e-12)
    assert discrete_lipschitz(x, ALL_PAIRS) == pytest.approx(1.0, abs=1e-12)


@given(st.integers(0, 10_000), st.floats(-3, 3))
def test_vertical_shift_invariance(seed, c):
    d = GridDomain.square(h=1 / 8)
    rng = np.random.default_rng(seed)
    u = GridFunction(d, rng.normal(size=(d.nx, d.ny)))
    for g in (EuclideanNorm(), Quadratic()):
        a = functional_value(g, u, Pinned(u)).total
        b = functional_value(g, u + c, Pinned(u + c)).total
        assert b == pytest.approx(a, rel=1e-12, abs=1e-12)


@given(st.integers(0, 10_000))
def test_quadratic_submodular_exact(seed):
    d = GridDomain.square(h=1 / 8)
    rng = np.random.default_rng(seed)
    u = GridFunction(d, rng.normal(size=(d.nx, d.ny)))
    v = GridFunction(d, rng.normal(size=(d.nx, d.ny)))
    G = lambda w: functional_value(Quadratic(), w, Pinned(w)).total  # noqa: E731
    assert G(lattice_max(u, v)) + G(lattice_min(u, v)) <= G(u) + G(v) + 1e-12 * (G(u) + G(v))
