import numpy as np
import pytest
from hypothesis import given, strategies as st

from xstar.errors import AlignmentError, DomainError
from xstar.grid import GridDomain
from xstar.heis import PlanePoint, TiltTransform, apply_tilt, dot_star, lattice_steps, star, xstar

fin = st.floats(-1e3, 1e3, allow_nan=False)


def test_star_examples():
    assert star(PlanePoint(1, 2)) == PlanePoint(-2, 1)
    assert star(PlanePoint(0, 0)) == PlanePoint(0, 0)
    assert star(star(PlanePoint(1, 2))) == PlanePoint(-1, -2)
    np.testing.assert_array_equal(star(np.array([[1.0, 2.0], [3.0, -1.0]])), [[-2.0, 1.0], [1.0, 3.0]])


def test_xstar_examples():
    assert xstar(PlanePoint(1, 0)) == PlanePoint(0, 2)
    assert xstar(PlanePoint(0, 1)) == PlanePoint(-2, 0)
    assert xstar(PlanePoint(1, 1)) == PlanePoint(-2, 2)


def test_plane_point_rejects_nonfinite():
    with pytest.raises(DomainError):
        PlanePoint(float("inf"), 0.0)


@given(fin, fin, fin, fin)
def test_star_properties(x1, y1, x2, y2):
    z1, z2 = np.array([x1, y1]), np.array([x2, y2])
    assert dot_star(z1, 3 * z1) == 0.0 or abs(dot_star(z1, 3 * z1)) <= 1e-15 * (x1 * x1 + y1 * y1) * 3
    assert np.dot(z1, z2) == pytest.approx(np.dot(star(z1), star(z2)), abs=1e-12 * (1 + abs(x1 * x2) + abs(y1 * y2)))
    np.testing.assert_array_equal(star(star(star(star(z1)))), z1)
    assert dot_star(z1, z2) == -dot_star(z2, z1)


def test_lattice_steps():
    assert lattice_steps((0.25, -0.5), 0.125) == (2, -4)
    with pytest.raises(AlignmentError):
        lattice_steps((0.1, 0.0), 0.125)


def test_tilt_examples():
    d = GridDomain.square(h=1 / 8)
    u = d.sample(lambda x, y: np.sin(x) + y)
    same = apply_tilt(u, TiltTransform((0.0, 0.0), 0.0))
    np.testing.assert_array_equal(same.values[d.inside], u.values[d.inside])
    plus = apply_tilt(u, TiltTransform((0.0, 0.0), 5.0))
    np.testing.assert_allclose(plus.values[d.inside], u.values[d.inside] + 5, atol=0, rtol=0)
    h = d.h
    v = apply_tilt(d.zeros(), TiltTransform((h, 0.0), 0.0))
    X, Y = v.domain.coords()
    np.testing.assert_allclose(v.values[d.inside], (2 * h * Y)[d.inside], atol=1e-15)


def test_tilt_translates_domain_and_checks_target():
    d = GridDomain.square(h=1 / 8)
    v = apply_tilt(d.zeros(), TiltTransform((0.25, -0.125), 0.0))
    assert v.domain.x0 == pytest.approx(d.x0 - 0.25) and v.domain.y0 == pytest.approx(d.y0 + 0.125)
    with pytest.raises(AlignmentError):
        apply_tilt(d.zeros(), TiltTransform((0.25, 0.0)), target=d)
    with pytest.raises(AlignmentError):
        apply_tilt(d.zeros(), TiltTransform((0.1, 0.0)))
