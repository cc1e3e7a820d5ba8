import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from visangle.errors import BadParam, UnknownDensity
from visangle.geometry import make_disk, perimeter
from visangle.line_space import (
    ANTI_PI_PERIODIC, GENERAL_2PI, PI_PERIODIC, density_catalog, hits, invariance_check,
    line_coords, line_through, pair_measure_direct, pair_measure_fourier, parse_density,
    random_motions, rigid_motion, standard_densities,
)

PI = math.pi


def test_catalog_coefficients():
    assert density_catalog("const").A(4).tolist() == [1.0, 0, 0, 0, 0]
    A = density_catalog("abs_sin_4").A(6)
    assert A[0] == pytest.approx(8 / PI)
    assert A[2] == pytest.approx((16 / PI) / (1 - 4))
    assert A[4] == pytest.approx((16 / PI) / (1 - 16))
    assert parse_density("power_sine:3").A(2)[2] == pytest.approx(4.5, rel=1e-15)
    A = parse_density("abs_cos").A(4)
    assert A[0] == pytest.approx(2 / PI) and A[2] == pytest.approx(4 / (3 * PI))


@pytest.mark.parametrize("dens", standard_densities() + [parse_density("power_sine:4"),
                                                          parse_density("hurwitz:3")],
                         ids=lambda d: d.id)
def test_closed_coefficients_match_numeric(dens):
    closed = dens.A(12)
    numeric, sine = dens.numeric_A(12)
    assert np.allclose(closed, numeric, atol=1e-10, rtol=0)
    assert np.max(np.abs(sine)) < 1e-10
    if dens.periodicity_class == PI_PERIODIC:
        assert np.max(np.abs(numeric[1::2])) < 1e-10


def test_periodicity_classes():
    assert parse_density("cos:3").periodicity_class == ANTI_PI_PERIODIC
    assert parse_density("cos:2").periodicity_class == PI_PERIODIC
    assert parse_density("hurwitz:3").periodicity_class == GENERAL_2PI
    assert parse_density("hurwitz:4").periodicity_class == PI_PERIODIC


def test_catalog_errors():
    with pytest.raises(UnknownDensity):
        density_catalog("gauss")
    with pytest.raises(BadParam):
        parse_density("power_sine:2")
    with pytest.raises(BadParam):
        parse_density("power_sine")
    with pytest.raises(BadParam):
        parse_density("hurwitz:1")
    with pytest.raises(BadParam):
        parse_density("const:3")


def test_line_coords():
    assert line_coords(-1.0, 0.0) == pytest.approx((1.0, PI))
    line = line_through((0.0, 2.0), 0.0)
    assert line == pytest.approx((2.0, PI / 2))
    assert not hits(make_disk(), line)
    assert hits(make_disk(), line_through((0.0, 0.5), 0.3))


def test_pair_measure_examples(suite):
    disk = make_disk()
    assert pair_measure_fourier(disk, parse_density("const")) == pytest.approx(4 * PI**2, rel=1e-15)
    assert pair_measure_direct(disk, parse_density("const")).value == pytest.approx(4 * PI**2, rel=1e-14)
    assert pair_measure_direct(disk, parse_density("abs_sin_4")).value == pytest.approx(32 * PI, rel=1e-11)
    # |sin| is abs_sin_4 / 4; odd harmonics of the body meet even coefficients only
    cw = suite["const_width"]
    assert pair_measure_fourier(cw, parse_density("abs_sin_4")) / 4 == pytest.approx(8 * PI, rel=1e-14)
    for body in suite.values():
        for k in range(2, min(body.kmax, 6) + 1):
            val = pair_measure_fourier(body, parse_density(f"cos:{k}"))
            assert val == pytest.approx(PI**2 * body.c_sq[k], rel=1e-14, abs=1e-300)


def test_direct_matches_fourier_ellipse(suite):
    e = suite["ellipse"]
    dens = parse_density("cos:2")
    direct = pair_measure_direct(e, dens).value
    assert direct == pytest.approx(pair_measure_fourier(e, dens), rel=1e-8)
    assert direct == pytest.approx(PI**2 * e.c_sq[2], rel=1e-8)


def test_rigid_motion_examples(suite):
    moved = rigid_motion(make_disk(), 0.0, (0.3, 0.0))
    assert moved.a0 == 1.0 and moved.cos_coeffs[0] == pytest.approx(0.3)
    assert moved.c_sq[1] == pytest.approx(0.09)
    g = suite["generic"]
    full = rigid_motion(g, 2 * PI)
    assert np.allclose(full.cos_coeffs, g.cos_coeffs, atol=1e-15)
    assert np.allclose(full.sin_coeffs, g.sin_coeffs, atol=1e-15)
    e = suite["ellipse"]
    quarter = rigid_motion(e, PI / 2)
    assert quarter.cos_coeffs[1] == pytest.approx(-e.cos_coeffs[1], rel=1e-14)
    assert quarter.c_sq[2] == pytest.approx(e.c_sq[2], rel=1e-14)


def test_invariance_examples(suite):
    disk = make_disk()
    res = invariance_check(disk, parse_density("abs_sin_4"), random_motions(disk, 20, seed=0))
    assert res.expected_invariant and res.max_rel < 1e-10
    e = suite["ellipse"]
    shifts = [(0.0, v) for v in [(0.2, 0.0), (0.0, -0.3), (0.1, 0.1)]]
    assert invariance_check(e, parse_density("const"), shifts).max_rel < 1e-10
    res = invariance_check(disk, parse_density("cos:1"), [(0.0, (0.3, 0.0))])
    assert not res.expected_invariant
    assert res.base == 0.0
    assert res.values[0] == pytest.approx(PI**2 * 0.09, rel=1e-14)


@settings(max_examples=25, deadline=None)
@given(st.floats(0, 2 * PI), st.floats(-0.4, 0.4), st.floats(-0.4, 0.4))
def test_motion_keeps_perimeter(theta, vx, vy):
    body = make_disk()
    assert perimeter(rigid_motion(body, theta, (vx, vy))) == perimeter(body)
