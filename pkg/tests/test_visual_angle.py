import math

import numpy as np
import pytest

from visangle.errors import PointNotExterior
from visangle.exterior import radial_boundary
from visangle.geometry import make_disk, support_eval
from visangle.line_space import rigid_motion
from visangle.visual_angle import (
    direction_angle, is_exterior, omega_split, polyline_visual_angle, probe, tangent_normals,
    visual_angle, visual_angles,
)

# tangents from (4,0) to x^2/4 + y^2 = 1 have slopes +-1/sqrt(12)
ELLIPSE_OMEGA_40 = 0.562069803005627195440029900725
# tangents from (3,3): 5m^2 - 18m + 8 = 0
ELLIPSE_OMEGA_33 = 0.777890373765877270705282470284


def exterior_points(body, n, seed):
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0, 2 * math.pi, n)
    gap = 10.0 ** rng.uniform(-6, 1, n)
    r = radial_boundary(body, theta) * (1 + gap)
    return r * np.cos(theta), r * np.sin(theta)


def boundary_polyline(body, n=100_000):
    phi = np.arange(n) * (2 * math.pi / n)
    p, dp, _ = support_eval(body, phi)
    return np.column_stack((p * np.cos(phi) - dp * np.sin(phi), p * np.sin(phi) + dp * np.cos(phi)))


def test_is_exterior_examples(suite):
    flag, margin = is_exterior(make_disk(), (2.0, 0.0))
    assert flag and margin == pytest.approx(1.0, abs=1e-12)
    flag, margin = is_exterior(make_disk(), (0.5, 0.0))
    assert not flag and margin == pytest.approx(-0.5, abs=1e-12)
    assert is_exterior(suite["ellipse"], (0.0, 1.5))[0]


def test_tangent_normals_disk():
    d = 3.0
    got = sorted(tangent_normals(make_disk(), (d, 0.0)))
    want = sorted([math.acos(1 / d), 2 * math.pi - math.acos(1 / d)])
    assert np.allclose(got, want, atol=1e-12)
    got = sorted(tangent_normals(make_disk(), (0.0, d)))
    want = sorted([math.pi / 2 - math.acos(1 / d), math.pi / 2 + math.acos(1 / d)])
    assert np.allclose(got, want, atol=1e-12)


def test_tangent_normals_translation(suite):
    got = sorted(tangent_normals(suite["shifted_disk"], (2.3, 0.0)))
    want = sorted(tangent_normals(make_disk(), (2.0, 0.0)))
    assert np.allclose(got, want, atol=1e-12)


def test_disk_point_two():
    info = probe(make_disk(), (2.0, 0.0))
    assert info.omega == pytest.approx(math.pi / 3, abs=1e-14)
    assert info.omega1 == pytest.approx(math.pi / 6, abs=1e-14)
    assert info.omega2 == pytest.approx(math.pi / 6, abs=1e-14)
    assert info.direction_angles == pytest.approx((math.pi / 3, 2 * math.pi / 3), abs=1e-14)


def test_far_field_tends_to_zero():
    assert visual_angle(make_disk(), (1e6, 0.0)) == pytest.approx(2e-6, rel=1e-9)


def test_interior_point_raises():
    with pytest.raises(PointNotExterior):
        visual_angle(make_disk(), (0.5, 0.0))


def test_disk_oracle_random():
    x, y = exterior_points(make_disk(), 1000, seed=1)
    va = visual_angles(make_disk(), x, y)
    oracle = 2 * np.arcsin(1 / np.hypot(x, y))
    assert np.max(np.abs(va.omega - oracle)) < 1e-10
    assert np.max(np.abs(va.omega1 - 0.5 * oracle)) < 1e-10


def test_split_sums_random(suite_body):
    x, y = exterior_points(suite_body, 1000, seed=2)
    va = visual_angles(suite_body, x, y)
    assert np.all((va.omega > 0) & (va.omega < math.pi))
    assert np.all((va.omega1 > 0) & (va.omega1 < math.pi))
    assert np.all((va.omega2 > 0) & (va.omega2 < math.pi))
    assert np.max(np.abs(va.omega1 + va.omega2 - va.omega)) < 1e-9


def test_ellipse_closed_form_points(suite):
    e = suite["ellipse"]
    assert visual_angle(e, (4.0, 0.0)) == pytest.approx(ELLIPSE_OMEGA_40, abs=1e-12)
    assert visual_angle(e, (3.0, 3.0)) == pytest.approx(ELLIPSE_OMEGA_33, abs=1e-12)
    w1, w2 = omega_split(e, (3.0, 3.0))
    assert abs(w1 + w2 - ELLIPSE_OMEGA_33) < 1e-9


def test_polyline_oracle_ellipse(suite):
    e = suite["ellipse"]
    poly = boundary_polyline(e)
    x, y = exterior_points(e, 40, seed=3)
    va = visual_angles(e, x, y)
    for i in range(x.size):
        assert va.omega[i] == pytest.approx(polyline_visual_angle(poly, (x[i], y[i])), abs=1e-6)


def test_rotation_equivariance(suite_body):
    x, y = exterior_points(suite_body, 200, seed=4)
    theta = 0.77
    rot = rigid_motion(suite_body, theta)
    c, s = math.cos(theta), math.sin(theta)
    a = visual_angles(suite_body, x, y)
    b = visual_angles(rot, c * x - s * y, s * x + c * y)
    for name in ("omega", "omega1", "omega2"):
        assert np.max(np.abs(getattr(a, name) - getattr(b, name))) < 1e-10


def test_boundary_limit_disk():
    eps = 10.0 ** -np.arange(1, 9)
    w = visual_angles(make_disk(), 1 + eps, np.zeros_like(eps)).omega
    assert np.all(np.diff(w) > 0)
    assert math.pi - w[-1] < 1e-3


def test_direction_angle_range():
    for phi in np.linspace(0.1, 6.2, 25):
        alpha = direction_angle((2.0, 1.0), phi)
        assert 0.0 <= alpha < math.pi
