import dataclasses
import math

import numpy as np
import pytest

from xstar.bsc import (AffineFunction, BSCCertificate, CertificationFailure, certify_affine, construct_supports,
                       envelopes, lipschitz_bound, min_norm_feasible, verify_bsc)
from xstar.grid import GridDomain


def test_certify_affine_examples():
    d = GridDomain.square(h=1 / 16)
    L = AffineFunction((1.0, -2.0), 0.5)
    cert = certify_affine(L, d)
    assert cert.Q == pytest.approx(math.sqrt(5), abs=1e-15)
    assert certify_affine(AffineFunction((0.0, 0.0), 1.0), d).Q == 0.0
    assert verify_bsc(cert, L, d.boundary_points(), tol=1e-12).passed


@pytest.mark.parametrize("verts", [
    [(0, 0), (1, 0), (1, 1), (0, 1)],
    [(0, 0), (2, 0), (0.5, 1.5)],
    [(0, 0), (1, -0.5), (2, 0.5), (1.2, 1.8), (-0.3, 1.0)],
])
def test_construct_supports_recovers_affine_slope(verts):
    d = GridDomain.polygon(verts, 1 / 16)
    L = AffineFunction((1.0, 2.0), -0.25)
    cert = construct_supports(L, d)
    assert isinstance(cert, BSCCertificate)
    assert cert.Q == pytest.approx(math.sqrt(5), abs=1e-9)
    assert verify_bsc(cert, L, d.boundary_points()).passed


def test_saddle_on_disk_certifies():
    d = GridDomain.disk(radius=1.0, h=1 / 16)
    phi = lambda x, y: x * x - y * y  # noqa: E731
    cert = construct_supports(phi, d)
    assert isinstance(cert, BSCCertificate)
    assert 2.0 < cert.Q < 4.0 + 1e-9
    assert verify_bsc(cert, phi, d.boundary_points()).passed


def test_square_datum_not_affine_fails():
    # a non-affine datum on a flat side has no supporting plane at interior side points
    d = GridDomain.square(h=1 / 16)
    out = construct_supports(lambda x, y: x * x, d)
    assert isinstance(out, CertificationFailure) and len(out.failed_anchors) > 0


def test_q_max_limits_certificate():
    d = GridDomain.disk(radius=1.0, h=1 / 16)
    out = construct_supports(lambda x, y: x * x - y * y, d, Q_max=1.0)
    assert isinstance(out, CertificationFailure)


def test_verify_bsc_detects_bad_certificates():
    d = GridDomain.square(h=1 / 16)
    L = AffineFunction((1.0, 0.0), 0.0)
    pts = d.boundary_points()
    cert = certify_affine(L, boundary_samples=pts)
    steep = cert.lower_slopes.copy()
    steep[0] = [cert.Q + 1.0, 0.0]
    bad = dataclasses.replace(cert, lower_slopes=steep)
    ver = verify_bsc(bad, L, pts)
    assert not ver.passed and ver.worst["slope_bound"] > 0.5
    lifted = dataclasses.replace(cert, lower_offsets=cert.lower_offsets + 0.1)
    ver = verify_bsc(lifted, L, pts)
    assert not ver.passed and ver.worst["ordering"] == pytest.approx(0.1)


def test_envelopes():
    d = GridDomain.square(h=1 / 8)
    L = AffineFunction((0.3, -0.7), 2.0)
    f1, f2 = envelopes(certify_affine(L, d))
    X, Y = d.coords()
    np.testing.assert_allclose(f1(X, Y), L(X, Y), atol=1e-15)
    np.testing.assert_allclose(f2(X, Y), L(X, Y), atol=1e-15)
    # two lower supports with different slopes: f1 is their max, with a kink on x = 0
    anchors = np.array([[-1.0, 0.0], [1.0, 0.0]])
    slopes = np.array([[-1.0, 0.0], [1.0, 0.0]])
    offs = np.array([0.0, 0.0])
    cert = BSCCertificate(1.0, anchors, slopes, offs, slopes, offs)
    f1, _ = envelopes(cert)
    x = np.linspace(-1, 1, 11)
    np.testing.assert_allclose(f1(x, 0 * x), np.abs(x), atol=1e-15)


def test_lipschitz_bound_examples():
    b = lipschitz_bound(1.0, GridDomain.square(h=1 / 8))
    assert b.sup_z == pytest.approx(math.sqrt(2)) and b.K == pytest.approx(1 + 4 * math.sqrt(2))
    assert lipschitz_bound(0.0, GridDomain.disk(radius=2.0, h=1 / 8)).K == pytest.approx(8.0)
    assert lipschitz_bound(math.sqrt(5), GridDomain.disk(radius=1.0, h=1 / 8)).K == pytest.approx(math.sqrt(5) + 4)


def test_min_norm_feasible_matches_brute_force():
    rng = np.random.default_rng(5)
    for _ in range(20):
        D = rng.normal(size=(12, 2))
        c = rng.uniform(0.1, 2.0, size=12)
        a = min_norm_feasible(D, c, rng)
        # origin is feasible when c > 0
        np.testing.assert_allclose(a, 0.0, atol=1e-15)
        c2 = c - 1.5
        a = min_norm_feasible(D, c2, rng)
        t = np.linspace(-6, 6, 1201)
        A = np.stack(np.meshgrid(t, t, indexing="ij"), axis=-1).reshape(-1, 2)
        feas = np.all(A @ D.T <= c2 + 1e-12, axis=1)
        if a is None:
            assert not feas.any()
            continue
        assert np.all(D @ a <= c2 + 1e-9)
        if feas.any():
            assert np.hypot(*a) <= np.min(np.hypot(A[feas, 0], A[feas, 1])) + 1e-9
