import math

import numpy as np
import pytest

from visangle.errors import DecayCheckFailed
from visangle.exterior import (
    ExteriorIntegrand, check_decay, disk_radial_oracle, exterior_integral, exterior_integral_split,
    outer_radius, radial_boundary, radial_profile,
)
from visangle.geometry import make_disk
from visangle.identities import crofton_g, h_k, hurwitz_f, masotti_g, power_sine_g
from visangle.line_space import rigid_motion

PI = math.pi
CATALOG = [
    ("crofton", crofton_g, PI**2),
    ("masotti", masotti_g, 16 * PI - PI**3),
    ("sin3", power_sine_g(3), 3 * PI**2),
    ("sin4", power_sine_g(4), None),
    ("f2", lambda w: hurwitz_f(2, w), None),
    ("f4", lambda w: hurwitz_f(4, w), None),
]


def test_radial_boundary(suite):
    theta = np.linspace(0, 2 * PI, 17)
    assert np.allclose(radial_boundary(make_disk(), theta), 1.0, atol=1e-14)
    e = suite["ellipse"]
    assert radial_boundary(e, np.array([0.0]))[0] == pytest.approx(2.0, abs=1e-12)
    assert radial_boundary(e, np.array([PI / 2]))[0] == pytest.approx(1.0, abs=1e-12)
    assert outer_radius(e) >= 2.0


@pytest.mark.parametrize("name,g,target", CATALOG, ids=[c[0] for c in CATALOG])
def test_disk_matches_radial_oracle(name, g, target):
    val = exterior_integral(make_disk(), ExteriorIntegrand(name, g), tol=1e-10).value
    oracle = disk_radial_oracle(g)
    assert val == pytest.approx(oracle, rel=1e-7)
    if target is not None:
        assert val == pytest.approx(target, rel=1e-9)


def test_split_disk_h3():
    g = lambda a, b: h_k(3, a) + h_k(3, b)
    val = exterior_integral_split(make_disk(), g, tol=1e-10).value
    assert val == pytest.approx(PI**2 / 8, rel=1e-9)
    assert disk_radial_oracle(g, split=True) == pytest.approx(PI**2 / 8, rel=1e-10)


def test_split_zero(suite):
    zero = lambda a, b: np.zeros_like(a)
    integrand = ExteriorIntegrand("zero", zero, split=True)
    assert exterior_integral(suite["generic"], integrand).value == 0.0


def test_tail_absorbed(suite):
    body = suite["generic"]
    integrand = ExteriorIntegrand("crofton", crofton_g)
    tol = 1e-8
    a = exterior_integral(body, integrand, tol=tol).value
    b = exterior_integral(body, integrand, tol=tol, r0=2 * outer_radius(body)).value
    assert abs(a - b) < tol * abs(a)


def test_translation_invariance(suite):
    integrand = ExteriorIntegrand("masotti", masotti_g)
    for name in ("ellipse", "generic"):
        body = suite[name]
        moved = rigid_motion(body, 0.0, (0.15, -0.1))
        a = exterior_integral(body, integrand).value
        b = exterior_integral(moved, integrand).value
        assert a == pytest.approx(b, rel=1e-6)


def test_decay_check():
    with pytest.raises(DecayCheckFailed):
        check_decay(ExteriorIntegrand("square", lambda w: w * w))
    ratios = check_decay(ExteriorIntegrand("crofton", crofton_g))
    assert ratios[-1] == pytest.approx(1 / 6, rel=1e-6)


def test_result_metadata():
    res = exterior_integral(make_disk(), ExteriorIntegrand("crofton", crofton_g))
    meta = res.meta()
    assert set(meta) == {"n_theta", "panels", "gl_order", "r0", "change"}
    assert res.history[-1]["value"] == res.value


def test_radial_profile_on_boundary(suite_body):
    prof = radial_profile(suite_body, 256)
    assert prof.max_margin(suite_body) < 1e-10
