"""Planar convex bodies described by the Fourier series of their support function.

The support function is the trigonometric polynomial

    p(phi) = a0 + sum_k (a_k cos k phi + b_k sin k phi),   k = 1..kmax

with the origin inside the body. Length, area and the harmonic spectrum
c_k^2 = a_k^2 + b_k^2 then have closed forms in the coefficients.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import NotConvex, NotPositive, TruncationError
from .numerics import TWO_PI, csum, fourier_analyze, periodic_quad

# validation grid; trig polynomials of degree <= 64 are resolved by it
VALIDATION_GRID = 4096
REFINE_BELOW = 1e-3
ELLIPSE_KMAX = 64
ELLIPSE_SAMPLES = 2048
ELLIPSE_TAIL_TOL = 1e-13
# coefficients below this (relative to a0) are snapped to zero for presets
SNAP_REL = 1e-15
EVAL_CHUNK = 1 << 15


class PlanarPoint(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class SupportBody:
    """Immutable convex body; build it with :func:`make_body` to validate."""

    a0: float
    a: tuple
    b: tuple
    name: str = ""

    @property
    def kmax(self) -> int:
        return len(self.a)

    @cached_property
    def cos_coeffs(self) -> np.ndarray:
        arr = np.array(self.a, dtype=float)
        arr.setflags(write=False)
        return arr

    @cached_property
    def sin_coeffs(self) -> np.ndarray:
        arr = np.array(self.b, dtype=float)
        arr.setflags(write=False)
        return arr

    @cached_property
    def c_sq(self) -> np.ndarray:
        """Harmonic spectrum indexed by k; ``c_sq[0]`` is 0 by convention."""
        out = np.zeros(self.kmax + 1)
        out[1:] = self.cos_coeffs**2 + self.sin_coeffs**2
        out.setflags(write=False)
        return out

    @cached_property
    def _active(self):
        k = np.arange(1, self.kmax + 1)
        keep = (self.cos_coeffs != 0) | (self.sin_coeffs != 0)
        return (k[keep].astype(float), self.cos_coeffs[keep], self.sin_coeffs[keep])

    @property
    def perimeter(self) -> float:
        return perimeter(self)

    @property
    def area(self) -> float:
        return area(self)

    def __call__(self, phi):
        return support_eval(self, phi)[0]

    def describe(self) -> str:
        return self.name or f"body(a0={self.a0:g}, kmax={self.kmax})"

    def to_dict(self) -> dict:
        return {"a0": self.a0, "a": list(self.a), "b": list(self.b)}


def _eval_chunk(body: SupportBody, phi: np.ndarray, order: int):
    k, a, b = body._active
    out = [np.full(phi.shape, body.a0)]
    if order >= 1:
        out.append(np.zeros(phi.shape))
    if order >= 2:
        out.append(np.zeros(phi.shape))
    if k.size == 0:
        return out
    ang = phi[..., None] * k
    c = np.cos(ang)
    s = np.sin(ang)
    # explicit multiply-and-sum keeps the reduction independent of BLAS threading
    out[0] = out[0] + (c * a + s * b).sum(axis=-1)
    if order >= 1:
        out[1] = (k * (b * c - a * s)).sum(axis=-1)
    if order >= 2:
        out[2] = -(k * k * (c * a + s * b)).sum(axis=-1)
    return out


def support_eval(body: SupportBody, phi, order: int = 2):
    """Evaluate p and its derivatives up to ``order`` at angle(s) ``phi``.

    Returns a tuple ``(p, dp, d2p)`` (truncated to ``order + 1`` entries);
    scalars in, floats out.
    """
    scalar = np.ndim(phi) == 0
    phi = np.asarray(phi, dtype=float)
    flat = phi.ravel()
    if flat.size <= EVAL_CHUNK:
        parts = _eval_chunk(body, flat, order)
    else:
        pieces = [_eval_chunk(body, flat[i:i + EVAL_CHUNK], order)
                  for i in range(0, flat.size, EVAL_CHUNK)]
        parts = [np.concatenate([pc[j] for pc in pieces]) for j in range(order + 1)]
    parts = [v.reshape(phi.shape) for v in parts]
    if scalar:
        return tuple(float(v) for v in parts)
    return tuple(parts)


def perimeter(body: SupportBody) -> float:
    return TWO_PI * body.a0


def area(body: SupportBody) -> float:
    """Closed form pi*a0^2 + (pi/2) * sum (1 - k^2) c_k^2."""
    k = np.arange(1, body.kmax + 1, dtype=float)
    terms = [math.pi * body.a0**2]
    terms.extend((0.5 * math.pi * (1.0 - k * k) * body.c_sq[1:]).tolist())
    return csum(terms)


def perimeter_quad(body: SupportBody, tol: float = 1e-14) -> float:
    return periodic_quad(lambda t: support_eval(body, t, 0)[0], tol).value


def area_quad(body: SupportBody, tol: float = 1e-14) -> float:
    """Area from 1/2 * integral of (p^2 - p'^2), by periodic quadrature."""
    def integrand(t):
        p, dp = support_eval(body, t, 1)
        return 0.5 * (p * p - dp * dp)
    return periodic_quad(integrand, tol).value


def curvature_margin(body: SupportBody, n: int = VALIDATION_GRID):
    """Minima of p and p + p'' on a uniform grid (coarse, unrefined)."""
    phi = np.arange(n) * (TWO_PI / n)
    p, _, d2p = support_eval(body, phi)
    return float(p.min()), float((p + d2p).min())


def _refined_min(body: SupportBody, fn, values: np.ndarray, phi: np.ndarray) -> float:
    """Grid minimum of ``fn``, refined by bounded search where it is small."""
    best = float(values.min())
    if best >= REFINE_BELOW:
        return best
    h = phi[1] - phi[0]
    # local minima of the sampled function that dip below the threshold
    is_min = (values <= np.roll(values, 1)) & (values <= np.roll(values, -1))
    for j in np.flatnonzero(is_min & (values < REFINE_BELOW)):
        res = minimize_scalar(fn, bounds=(phi[j] - h, phi[j] + h), method="bounded",
                              options={"xatol": 1e-13})
        best = min(best, float(res.fun), float(values[j]))
    return best


def _validate(body: SupportBody) -> None:
    c = np.sqrt(body.c_sq[1:])
    k = np.arange(1, body.kmax + 1, dtype=float)
    # sufficient: |p - a0| and |p''| terms are dominated by a0
    if body.a0 > float(np.sum(k * k * c)):
        return
    phi = np.arange(VALIDATION_GRID) * (TWO_PI / VALIDATION_GRID)
    p, _, d2p = support_eval(body, phi)
    pmin = _refined_min(body, lambda t: support_eval(body, t, 0)[0], p, phi)
    if not pmin > 0:
        raise NotPositive(f"support function reaches {pmin:.6g} <= 0: origin is not interior")

    def radius(t):
        v = support_eval(body, t)
        return v[0] + v[2]

    rmin = _refined_min(body, radius, p + d2p, phi)
    if not rmin > 0:
        raise NotConvex(f"p + p'' reaches {rmin:.6g} <= 0: boundary is not strictly convex")


def make_body(a0: float, cos_coeffs: Sequence[float] = (), sin_coeffs: Sequence[float] = (),
              name: str = "") -> SupportBody:
    """Build and validate a body from support-function coefficients.

    ``cos_coeffs[k-1]`` and ``sin_coeffs[k-1]`` multiply ``cos k phi`` and
    ``sin k phi``. Raises :class:`NotPositive` when the origin is not
    interior and :class:`NotConvex` when ``p + p''`` is not positive.
    """
    a = [float(v) for v in cos_coeffs]
    b = [float(v) for v in sin_coeffs]
    if len(a) != len(b):
        raise ValueError("cos_coeffs and sin_coeffs must have equal length")
    vals = [float(a0)] + a + b
    if not all(math.isfinite(v) for v in vals):
        raise ValueError("coefficients must be finite")
    # trailing all-zero harmonics carry no information
    while a and a[-1] == 0.0 and b[-1] == 0.0:
        a.pop()
        b.pop()
    body = SupportBody(float(a0), tuple(a), tuple(b), name)
    _validate(body)
    return body


def make_disk(r: float = 1.0) -> SupportBody:
    if not r > 0:
        raise ValueError("radius must be positive")
    return make_body(r, name=f"disk:{r:g}")


def make_ellipse(a: float, b: float, kmax: int = ELLIPSE_KMAX,
                 tail_tol: float = ELLIPSE_TAIL_TOL) -> SupportBody:
    """Centred ellipse with semi-axes ``a >= b > 0`` along x and y.

    The support function sqrt(a^2 cos^2 + b^2 sin^2) is analysed numerically
    and truncated at ``kmax``; :class:`TruncationError` is raised when the
    sup-norm of the discarded part exceeds ``tail_tol * a0``.
    """
    if not (a >= b > 0):
        raise ValueError("need a >= b > 0")
    body, tail = _ellipse_with_tail(a, b, kmax)
    if tail > tail_tol * body.a0:
        raise TruncationError(f"ellipse({a:g},{b:g}) Fourier tail {tail:.3g} exceeds tolerance")
    return body


def ellipse_tail(a: float, b: float, kmax: int = ELLIPSE_KMAX) -> float:
    """Sup-norm of support function minus its degree-``kmax`` truncation."""
    return _ellipse_with_tail(a, b, kmax)[1]


def _ellipse_with_tail(a, b, kmax):
    n = max(ELLIPSE_SAMPLES, 8 * kmax)
    phi = np.arange(n) * (TWO_PI / n)
    samples = np.sqrt((a * np.cos(phi)) ** 2 + (b * np.sin(phi)) ** 2)
    a0, ca, cb = fourier_analyze(samples, n // 4)
    ca = ca[:kmax].copy()
    cb = cb[:kmax].copy()
    ca[np.abs(ca) < SNAP_REL * a0] = 0.0
    cb[np.abs(cb) < SNAP_REL * a0] = 0.0
    name = f"ellipse:{a:g},{b:g}"
    body = make_body(a0, ca, cb, name=name)
    fine = np.arange(4 * n) * (TWO_PI / (4 * n))
    exact = np.sqrt((a * np.cos(fine)) ** 2 + (b * np.sin(fine)) ** 2)
    tail = float(np.max(np.abs(exact - support_eval(body, fine, 0)[0])))
    return body, tail


def make_const_width(a0: float, odd_coeffs: dict) -> SupportBody:
    """Constant-width body from ``{k: (a_k, b_k)}`` with odd ``k`` only."""
    if any(int(k) % 2 == 0 for k in odd_coeffs):
        raise ValueError("constant-width bodies only have odd harmonics")
    kmax = max((int(k) for k in odd_coeffs), default=0)
    a = [0.0] * kmax
    b = [0.0] * kmax
    for k, val in odd_coeffs.items():
        ak, bk = (val, 0.0) if np.ndim(val) == 0 else val
        a[int(k) - 1] = float(ak)
        b[int(k) - 1] = float(bk)
    return make_body(a0, a, b, name=f"const_width:{a0:g}")


def body_from_json(text: str, name: str = "") -> SupportBody:
    data = json.loads(text)
    return make_body(data["a0"], data.get("a", []), data.get("b", []),
                     name=name or data.get("name", ""))


def body_to_json(body: SupportBody) -> str:
    return json.dumps(body.to_dict())


def harmonic_spectrum(body: SupportBody) -> dict:
    """Nonzero c_k^2 keyed by k."""
    return {k: float(v) for k, v in enumerate(body.c_sq) if k >= 1 and v != 0.0}


def standard_suite() -> dict:
    """The five reference bodies used by the acceptance checks."""
    return {
        "disk": make_disk(1.0),
        "shifted_disk": make_body(1.0, [0.3], [0.0], name="shifted_disk"),
        "ellipse": make_ellipse(2.0, 1.0),
        "const_width": make_body(1.0, [0, 0, 0.1], [0, 0, 0], name="const_width"),
        "generic": make_body(1.0, [0, 0.15, 0, 0.02], [0, 0, 0.05, 0], name="generic"),
    }
