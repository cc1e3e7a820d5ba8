import math

import numpy as np
import pytest

from visangle.numerics import (
    csum, fourier_analyze, gl_integrate, ordered_map, periodic_quad, periodic_quad_2d, worker_count,
)


def test_csum_compensates():
    vals = [1e16, 1.0, -1e16] * 1000
    assert csum(vals) == 1000.0


def test_periodic_quad_examples():
    assert periodic_quad(lambda t: np.cos(t) ** 2).value == pytest.approx(math.pi, rel=1e-13)
    res = periodic_quad(lambda t: np.abs(np.sin(t)), tol=1e-12, extrapolate=True)
    assert res.value == pytest.approx(4.0, rel=1e-11)


def test_periodic_quad_2d_separable_disk():
    res = periodic_quad_2d(lambda a, b: np.ones_like(a) * np.ones_like(b))
    assert res.value == pytest.approx(4 * math.pi**2, rel=1e-14)


def test_fourier_analyze_cos2():
    n = 256
    x = np.arange(n) * (2 * math.pi / n)
    a0, a, b = fourier_analyze(np.cos(2 * x), 8)
    assert a[1] == pytest.approx(1.0, abs=1e-14)
    assert abs(a0) < 1e-14
    assert np.max(np.abs(np.delete(a, 1))) < 1e-14
    assert np.max(np.abs(b)) < 1e-14


def test_fourier_analyze_needs_oversampling():
    with pytest.raises(ValueError):
        fourier_analyze(np.zeros(16), 8)


def test_gl_integrate_breakpoints():
    val = gl_integrate(lambda t: np.abs(t - 0.3), 0.0, 1.0, panels=2, breakpoints=[0.3])
    assert val == pytest.approx(0.5 * (0.09 + 0.49), rel=1e-14)


def test_ordered_map_preserves_order(monkeypatch):
    monkeypatch.setenv("VAL_THREADS", "4")
    assert worker_count() == 4
    assert ordered_map(lambda v: v * v, list(range(20))) == [v * v for v in range(20)]
    monkeypatch.setenv("VAL_THREADS", "junk")
    assert worker_count() >= 1
