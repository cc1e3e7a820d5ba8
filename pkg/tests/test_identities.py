import json
import math

import mpmath as mp
import numpy as np
import pytest

from visangle.errors import BadParam, UnknownIdentity
from visangle.geometry import make_disk
from visangle.identities import (
    IDENTITIES, SERIES_BELOW, Check, abs_cos_H, build_H, check_H, crofton_g, h_k, hurwitz_f,
    masotti_g, power_sine_L2_coeff, rel_err, verify,
)
from visangle.line_space import parse_density, standard_densities
from visangle.special import power_sine_A

PI = math.pi
H_DENSITIES = standard_densities() + [parse_density(s) for s in
                                      ("power_sine:4", "power_sine:5", "hurwitz:3", "cos:3", "cos:5")]
mp.mp.dps = 40


def test_hurwitz_f_value():
    assert hurwitz_f(2, PI / 2) == pytest.approx(4 / 3, rel=1e-15)


@pytest.mark.parametrize("fn,ref", [
    (crofton_g, lambda x: x - mp.sin(x)),
    (masotti_g, lambda x: x * x - mp.sin(x) ** 2),
    (lambda x: hurwitz_f(3, x), lambda x: -2 * mp.sin(x) + 2 * mp.sin(2 * x) - mp.sin(4 * x) / 2),
    (lambda x: h_k(3, x), lambda x: mp.quad(lambda s: (x - s) * mp.cos(3 * s) * mp.sin(s), [0, x])),
    (lambda x: h_k(1, x), lambda x: (2 * x - mp.sin(2 * x)) / 8),
], ids=["crofton", "masotti", "f3", "H3", "H1"])
def test_series_switch_accuracy(fn, ref):
    for x in (1e-6, 0.5 * SERIES_BELOW, 0.999 * SERIES_BELOW, SERIES_BELOW, 2 * SERIES_BELOW, 0.3):
        want = float(ref(mp.mpf(x)))
        got = float(np.asarray(fn(np.array([x])))[0])
        assert got == pytest.approx(want, rel=1e-12)


@pytest.mark.parametrize("dens", H_DENSITIES, ids=lambda d: d.id)
def test_H_conditions(dens):
    H = build_H(dens)
    info = check_H(H, dens)
    assert info["H0"] == 0.0
    assert max(info["cubic_ratio"]) < 10.0
    assert info["d2_residual"] < 1e-6


@pytest.mark.parametrize("dens", H_DENSITIES, ids=lambda d: d.id)
def test_numeric_H_matches_closed(dens):
    x = np.linspace(0, PI, 1001)
    closed = build_H(dens)
    numeric = build_H(dens, numeric=True)
    assert closed.closed_form and not numeric.closed_form
    assert np.max(np.abs(closed(x) - numeric(x))) < 1e-9


def test_H_values():
    assert build_H(parse_density("const"))(np.array([PI]))[0] == pytest.approx(PI, rel=1e-15)
    assert build_H(parse_density("abs_sin_4"))(np.array([PI]))[0] == pytest.approx(PI**2, rel=1e-15)
    assert float(h_k(3, PI / 2)) == pytest.approx(-PI / 16, rel=1e-14)
    assert float(h_k(3, PI)) == pytest.approx(-PI / 8, rel=1e-14)


def test_abs_cos_H_continuity():
    left = float(abs_cos_H(np.nextafter(PI / 2, 0)))
    right = float(abs_cos_H(np.nextafter(PI / 2, 4)))
    assert abs(left - right) < 1e-12
    assert float(abs_cos_H(PI / 2)) == pytest.approx(PI / 8, rel=1e-15)


@pytest.mark.parametrize("k", [3, 5, 7, 9])
def test_antipi_constant(k):
    closed = 4 * h_k(k, PI / 2) - h_k(k, PI)
    assert float(closed) == pytest.approx(-PI / (k * k - 1), rel=1e-13)
    numeric = build_H(parse_density(f"cos:{k}"), numeric=True)
    x = np.array([PI / 2, PI])
    hn = numeric(x)
    assert 2 * hn[0] - hn[1] == pytest.approx(2 * float(h_k(k, PI / 2)) - float(h_k(k, PI)), abs=1e-9)


def test_power_sine_L2_coefficient():
    for m in range(3, 9):
        assert power_sine_L2_coeff(m) == pytest.approx(power_sine_A(m, 0) / 4, rel=1e-14)
    assert power_sine_L2_coeff(3) == pytest.approx(0.75, rel=1e-15)


def test_rel_err_and_check():
    assert rel_err(1.0, 1.0) == 0.0
    c = Check("x", "identity", 0.0, 1e-20, 1e-8, metric="scaled", scale=1.0)
    assert c.passed
    d = Check("d", "diagnostic", 1.0, 2.0, 0.0)
    assert d.passed


def test_verify_examples(suite):
    r = verify("crofton", make_disk())
    assert r.lhs == pytest.approx(4 * PI**2, rel=1e-6)
    assert r.rhs == pytest.approx(4 * PI**2, rel=1e-15)
    assert r.rel_err < 1e-6 and r.passed
    e = suite["ellipse"]
    r = verify("hurwitz_even", e, {"k": 2})
    L = e.perimeter
    assert r.rhs == pytest.approx(L * L + 3 * PI**2 * e.c_sq[2], rel=1e-15)
    assert r.passed
    r = verify("hurwitz_odd_consistency", make_disk(), {"k": 3})
    assert r.terms["split_integral"] == pytest.approx(PI**2 / 8, rel=1e-8)
    assert r.lhs == pytest.approx(PI**2, rel=1e-8)
    assert r.rhs == pytest.approx(PI**2, rel=1e-15)


def test_verify_report_serialises(suite):
    r = verify("antipi", suite["generic"], {"k": 3})
    d = r.to_dict()
    assert d["wall_time"] is None
    assert json.loads(json.dumps(d)) == d
    assert r.to_dict(timings=True)["wall_time"] > 0
    diag = [c for c in r.checks if c.kind == "diagnostic"]
    assert diag and not diag[0].err < 1e-4


def test_verify_errors(suite):
    with pytest.raises(UnknownIdentity):
        verify("pythagoras", make_disk())
    with pytest.raises(BadParam):
        verify("hurwitz_even", make_disk(), {"k": 3})
    with pytest.raises(BadParam):
        verify("antipi", make_disk(), {"k": 2})
    with pytest.raises(BadParam):
        verify("power_sine", make_disk(), {"m": 2})
    with pytest.raises(BadParam):
        verify("const_width_lambda", suite["ellipse"])


def test_identity_order():
    assert list(IDENTITIES)[:3] == ["crofton", "cauchy_crofton", "hurwitz_even"]
    assert len(IDENTITIES) == 11
