"""Integrals over the exterior of a body of functions of the visual angle.

The exterior is swept in polar coordinates (r, theta) about the origin.
For each direction the radial integral is split at R0 = 2 max rho:

* inner annulus rho(theta) <= r <= R0 with r = rho + s^2, which removes the
  square-root behaviour of omega at the boundary;
* tail r >= R0 with r = R0 / u, u in (0, 1], so that
  g(omega) r dr = g(omega) R0^2 / u^3 du stays bounded when g = O(omega^3).

Both pieces use composite Gauss-Legendre; directions use the periodic
trapezoid rule. Node geometry (omega, omega1, omega2) is cached per body and
grid, so several integrands on one body share the root finding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, List, Optional

import numpy as np

from .errors import DecayCheckFailed, NoConvergence
from .geometry import SupportBody, support_eval
from .numerics import TWO_PI, gl_panels, ordered_map
from .visual_angle import exterior_margins, visual_angles

GL_ORDER = 16
THETA_N0 = 128
THETA_NMAX = 4096
PANELS_MAX = 64
THETA_CHUNK = 16
RHO_GRID = 1024
DECAY_PROBES = (1e-2, 1e-3, 1e-4)


@dataclass(frozen=True)
class ExteriorIntegrand:
    """A function of the visual angle, or of its split (omega1, omega2).

    ``split`` integrands are called as ``func(omega1, omega2)``; plain ones
    as ``func(omega)``. ``decay_order`` is the claimed q with g = O(omega^q).
    """

    id: str
    func: Callable
    decay_order: int = 3
    split: bool = False

    def __call__(self, *args):
        return self.func(*args)

    def on_small(self, w):
        return self.func(0.5 * w, 0.5 * w) if self.split else self.func(w)


def check_decay(integrand: ExteriorIntegrand) -> List[float]:
    """Probe |g(w)| / w^3 at small w; raise if it grows as w -> 0."""
    ratios = []
    for w in DECAY_PROBES:
        val = float(np.asarray(integrand.on_small(np.array([w])))[0])
        ratios.append(abs(val) / w**3)
    if not all(math.isfinite(r) for r in ratios) or ratios[-1] > 2.0 * ratios[0] + 1e-8:
        raise DecayCheckFailed(
            f"integrand {integrand.id!r} is not O(omega^3): |g/w^3| = {ratios}")
    if integrand.decay_order < 3:
        raise DecayCheckFailed(f"integrand {integrand.id!r} declares decay order < 3")
    return ratios


def radial_boundary(body: SupportBody, theta) -> np.ndarray:
    """Boundary distance rho(theta) from the origin in direction theta.

    The boundary point with outward normal phi is X = p u + p' u_perp, and
    its polar angle increases strictly with phi (rate p (p + p'') / |X|^2);
    solve polar_angle(phi) = theta by safeguarded Newton on
    phi in [theta - pi/2, theta + pi/2].
    """
    theta = np.asarray(theta, dtype=float)
    shape = theta.shape
    th = theta.ravel()
    lo = th - 0.5 * math.pi
    hi = th + 0.5 * math.pi
    phi = th.copy()
    for _ in range(100):
        p, dp, d2p = support_eval(body, phi)
        c, s = np.cos(phi), np.sin(phi)
        xx = p * c - dp * s
        yy = p * s + dp * c
        # wrapped difference between the boundary point's angle and theta
        diff = np.arctan2(np.sin(np.arctan2(yy, xx) - th), np.cos(np.arctan2(yy, xx) - th))
        rate = p * (p + d2p) / (xx * xx + yy * yy)
        lo = np.where(diff < 0, phi, lo)
        hi = np.where(diff > 0, phi, hi)
        step = phi - diff / rate
        ok = (step > lo) & (step < hi)
        new = np.where(ok, step, 0.5 * (lo + hi))
        moved = np.abs(new - phi)
        phi = np.where(diff == 0, phi, new)
        if np.all(moved <= 1e-15 * (1.0 + np.abs(phi))):
            break
    p, dp = support_eval(body, phi, 1)
    return np.hypot(p, dp).reshape(shape)


@dataclass(frozen=True)
class RadialProfile:
    """Boundary radial function rho sampled on a uniform theta grid."""

    theta: np.ndarray
    rho: np.ndarray

    def points(self):
        return self.rho * np.cos(self.theta), self.rho * np.sin(self.theta)

    def max_margin(self, body: SupportBody) -> float:
        """Largest |P.u - p| over the samples; boundary points give 0."""
        x, y = self.points()
        return float(np.max(np.abs(exterior_margins(body, x, y))))


def radial_profile(body: SupportBody, n: int = RHO_GRID) -> RadialProfile:
    theta = np.arange(n) * (TWO_PI / n)
    return RadialProfile(theta, radial_boundary(body, theta))


@lru_cache(maxsize=16)
def outer_radius(body: SupportBody) -> float:
    """R0 = 2 max rho, with rho sampled on a fixed grid."""
    th = np.arange(RHO_GRID) * (TWO_PI / RHO_GRID)
    return 2.0 * float(radial_boundary(body, th).max())


@dataclass
class _Rays:
    """Nodes and weights for a batch of directions (row per direction)."""

    weights: np.ndarray
    omega: np.ndarray
    omega1: np.ndarray
    omega2: np.ndarray


def _ray_nodes(body: SupportBody, theta: np.ndarray, panels: int, r0: float):
    rho = radial_boundary(body, theta)
    s_nodes, s_w = gl_panels(0.0, 1.0, panels, GL_ORDER)
    u_nodes, u_w = gl_panels(0.0, 1.0, panels, GL_ORDER)
    span = np.sqrt(r0 - rho)[:, None]
    s = span * s_nodes[None, :]
    r_in = rho[:, None] + s * s
    w_in = r_in * 2.0 * s * span * s_w[None, :]
    r_out = np.broadcast_to(r0 / u_nodes[None, :], (theta.size, u_nodes.size))
    w_out = np.broadcast_to(r0 * r0 / u_nodes**3 * u_w, (theta.size, u_nodes.size))
    r = np.concatenate([r_in, r_out], axis=1)
    w = np.concatenate([w_in, w_out], axis=1)
    return r, w


def _compute_rays(body: SupportBody, theta: np.ndarray, panels: int, r0: float) -> _Rays:
    r, w = _ray_nodes(body, theta, panels, r0)
    x = r * np.cos(theta)[:, None]
    y = r * np.sin(theta)[:, None]
    va = visual_angles(body, x, y)
    shp = r.shape
    return _Rays(w, va.omega.reshape(shp), va.omega1.reshape(shp), va.omega2.reshape(shp))


@lru_cache(maxsize=512)
def _ray_block(body: SupportBody, n_theta: int, start: int, stop: int, step: int,
               panels: int, r0: float) -> _Rays:
    theta = np.arange(start, stop, step) * (TWO_PI / n_theta)
    return _compute_rays(body, theta, panels, r0)


def _level_blocks(n_theta: int):
    """Fixed partition of direction indices into independent work items.

    Level n reuses level n/2 (its even indices) and adds the odd ones, so
    the partition depends only on n_theta, never on the number of workers.
    """
    blocks = []
    n = n_theta
    while n > THETA_N0:
        for start in range(0, n, 2 * THETA_CHUNK):
            blocks.append((n, start + 1, min(n, start + 2 * THETA_CHUNK), 2))
        n //= 2
    for start in range(0, n, THETA_CHUNK):
        blocks.append((n, start, min(n, start + THETA_CHUNK), 1))
    return blocks


def ray_data(body: SupportBody, n_theta: int, panels: int, r0: Optional[float] = None) -> List[_Rays]:
    r0 = outer_radius(body) if r0 is None else r0
    blocks = _level_blocks(n_theta)
    return ordered_map(lambda b: _ray_block(body, b[0], b[1], b[2], b[3], panels, r0), blocks)


def _integrate_blocks(blocks: List[_Rays], integrand: ExteriorIntegrand, n_theta: int) -> float:
    parts = []
    for blk in blocks:
        g = integrand(blk.omega1, blk.omega2) if integrand.split else integrand(blk.omega)
        parts.extend(math.fsum(row) for row in (np.asarray(g) * blk.weights).tolist())
    return (TWO_PI / n_theta) * math.fsum(parts)


@dataclass
class ExteriorResult:
    value: float
    n_theta: int
    panels: int
    r0: float
    change: float
    history: List[dict] = field(default_factory=list)

    def __float__(self) -> float:
        return self.value

    def meta(self) -> dict:
        return {"n_theta": self.n_theta, "panels": self.panels, "gl_order": GL_ORDER,
                "r0": self.r0, "change": self.change}


def _fixed(body, integrand, n_theta, panels, r0):
    return _integrate_blocks(ray_data(body, n_theta, panels, r0), integrand, n_theta)


def exterior_integral(body: SupportBody, integrand: ExteriorIntegrand, tol: float = 1e-8,
                      atol: float = 1e-13, r0: Optional[float] = None,
                      n_theta0: int = THETA_N0, panels0: int = 1) -> ExteriorResult:
    """Integral of g(omega(P)) (or g(omega1, omega2)) over the exterior.

    Radial panels double at ``n_theta0`` directions until successive values
    agree to ``tol`` (relative, or ``atol`` absolute); then the number of
    directions doubles at that radial resolution until the same holds.
    """
    if not callable(integrand):
        raise TypeError("integrand must be an ExteriorIntegrand")
    check_decay(integrand)
    r0 = outer_radius(body) if r0 is None else float(r0)
    history: List[dict] = []

    def ok(new, old):
        return abs(new - old) <= max(tol * abs(new), atol)

    panels = panels0
    n_theta = n_theta0
    prev = _fixed(body, integrand, n_theta, panels, r0)
    history.append({"n_theta": n_theta, "panels": panels, "value": prev})
    while True:
        if 2 * panels > PANELS_MAX:
            raise NoConvergence(f"radial panels exceeded {PANELS_MAX} for {integrand.id}")
        panels *= 2
        val = _fixed(body, integrand, n_theta, panels, r0)
        history.append({"n_theta": n_theta, "panels": panels, "value": val})
        done = ok(val, prev)
        change = abs(val - prev)
        prev = val
        if done:
            break
    while True:
        if 2 * n_theta > THETA_NMAX:
            raise NoConvergence(f"directions exceeded {THETA_NMAX} for {integrand.id}")
        n_theta *= 2
        val = _fixed(body, integrand, n_theta, panels, r0)
        history.append({"n_theta": n_theta, "panels": panels, "value": val})
        done = ok(val, prev)
        change = max(change, abs(val - prev))
        prev = val
        if done:
            break
    return ExteriorResult(prev, n_theta, panels, r0, change, history)


def exterior_integral_split(body: SupportBody, func: Callable, tol: float = 1e-8,
                            atol: float = 1e-13, name: str = "split", **kw) -> ExteriorResult:
    """Integral of g(omega1, omega2) over the exterior."""
    integrand = func if isinstance(func, ExteriorIntegrand) else ExteriorIntegrand(name, func, split=True)
    return exterior_integral(body, integrand, tol=tol, atol=atol, **kw)


def disk_radial_oracle(g: Callable, radius: float = 1.0, split: bool = False) -> float:
    """One-dimensional reference for a centred disk.

    omega = 2 arcsin(R/r) and omega1 = omega2 = omega/2; the exterior
    integral becomes 2 pi int_R^inf g(omega) r dr, evaluated by adaptive
    quadrature in t = R/r.
    """
    from scipy.integrate import quad

    def f(t):
        w = 2.0 * math.asin(t)
        val = g(np.array([0.5 * w]), np.array([0.5 * w])) if split else g(np.array([w]))
        return float(np.asarray(val)[0]) * TWO_PI * radius * radius / t**3

    val, _ = quad(f, 0.0, 1.0, epsabs=0.0, epsrel=1e-13, limit=400)
    return val
