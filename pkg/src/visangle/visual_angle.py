"""Tangent lines from an exterior point and the visual angle they enclose.

For a point P the function h(phi) = P.u(phi) - p(phi), u = (cos, sin), is
positive exactly for the normal directions of lines that separate P from
the body. For exterior P this set is an arc whose two endpoints are the
normals of the support lines through P.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import DegenerateDirection, PointNotExterior, RootCountError
from .geometry import PlanarPoint, SupportBody, support_eval
from .numerics import TWO_PI

ROOT_GRID = 2048
MARGIN_EPS = 1e-9
ROOT_TOL = 1e-14
MAX_ITER = 80
BATCH = 512
HALF_PI = 0.5 * math.pi


@dataclass(frozen=True)
class VisualAngleData:
    point: PlanarPoint
    normal_angles: tuple
    direction_angles: tuple
    omega: float
    omega1: float
    omega2: float


class VisualAngleBatch(NamedTuple):
    """Per-point arrays for a batch of exterior points."""

    phi_a: np.ndarray
    phi_b: np.ndarray
    omega: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    omega1: np.ndarray
    omega2: np.ndarray


@lru_cache(maxsize=64)
def _root_grid(body: SupportBody):
    phi = np.arange(ROOT_GRID) * (TWO_PI / ROOT_GRID)
    p = support_eval(body, phi, 0)[0]
    return phi, np.cos(phi), np.sin(phi), p


def _h(body, x, y, phi, order=1):
    vals = support_eval(body, phi, order)
    c, s = np.cos(phi), np.sin(phi)
    out = [x * c + y * s - vals[0]]
    if order >= 1:
        out.append(-x * s + y * c - vals[1])
    if order >= 2:
        out.append(-x * c - y * s - vals[2])
    return out


def _golden_max(body, x, y, lo, hi, iters=70):
    """Vectorised golden-section maximisation of h on [lo, hi]."""
    g = 0.5 * (math.sqrt(5.0) - 1.0)
    c = hi - g * (hi - lo)
    d = lo + g * (hi - lo)
    fc = _h(body, x, y, c, 0)[0]
    fd = _h(body, x, y, d, 0)[0]
    for _ in range(iters):
        left = fc > fd
        hi = np.where(left, d, hi)
        lo = np.where(left, lo, c)
        new_c = hi - g * (hi - lo)
        new_d = lo + g * (hi - lo)
        c2 = np.where(left, new_c, d)
        d2 = np.where(left, c, new_d)
        fc2 = np.where(left, _h(body, x, y, new_c, 0)[0], fd)
        fd2 = np.where(left, fc, _h(body, x, y, new_d, 0)[0])
        c, d, fc, fd = c2, d2, fc2, fd2
    t = 0.5 * (lo + hi)
    return t, _h(body, x, y, t, 0)[0]


def _grid_values(body, x, y):
    _, cg, sg, pg = _root_grid(body)
    return x[:, None] * cg[None, :] + y[:, None] * sg[None, :] - pg[None, :]


def _margins(body, x, y, hv=None):
    """Refined max of h for each point, with the maximiser."""
    phi = _root_grid(body)[0]
    if hv is None:
        hv = _grid_values(body, x, y)
    j = np.argmax(hv, axis=1)
    hmax = hv[np.arange(x.size), j]
    step = TWO_PI / ROOT_GRID
    t, href = _golden_max(body, x, y, phi[j] - step, phi[j] + step)
    better = href >= hmax
    return np.where(better, href, hmax), np.where(better, t, phi[j])


def _solve(body, x, y, lo, hi, t, decreasing):
    """Safeguarded Newton for the unique root of h in each [lo, hi]."""
    active = np.ones(t.shape, dtype=bool)
    for _ in range(MAX_ITER):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        hv, dh = _h(body, x[idx], y[idx], t[idx], 1)
        pos = hv > 0
        move_lo = pos if decreasing else ~pos
        lo[idx] = np.where(move_lo, t[idx], lo[idx])
        hi[idx] = np.where(move_lo, hi[idx], t[idx])
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = t[idx] - hv / dh
        ok = np.isfinite(newton) & (newton >= lo[idx]) & (newton <= hi[idx])
        t_new = np.where(ok, newton, 0.5 * (lo[idx] + hi[idx]))
        done = (np.abs(t_new - t[idx]) <= ROOT_TOL) | (hv == 0) | (hi[idx] - lo[idx] <= ROOT_TOL)
        t[idx] = np.where(hv == 0, t[idx], t_new)
        active[idx[done]] = False
    return t


def _tangent_chunk(body, x, y):
    phi = _root_grid(body)[0]
    step = TWO_PI / ROOT_GRID
    m = x.size
    hv = _grid_values(body, x, y)
    sign = hv > 0
    flips = sign != np.roll(sign, 1, axis=1)
    changes = np.count_nonzero(flips, axis=1)
    if np.any(changes > 2):
        i = int(np.flatnonzero(changes > 2)[0])
        raise RootCountError(f"found {changes[i]} sign changes of h for point ({x[i]:.6g}, {y[i]:.6g})")
    lo_a = np.empty(m)
    hi_a = np.empty(m)
    t_a = np.empty(m)
    lo_b = np.empty(m)
    hi_b = np.empty(m)
    t_b = np.empty(m)

    seen = changes == 2
    if seen.any():
        rows, cols = np.nonzero(flips[seen])
        cols = cols.reshape(-1, 2)
        sub = np.flatnonzero(seen)
        hs = hv[sub]
        r = np.arange(sub.size)[:, None]
        h_hi = hs[r, cols]
        h_lo = hs[r, cols - 1]
        # a flip at column c brackets a root in [phi[c-1], phi[c]]
        up = h_hi > 0
        ia = np.argmax(up, axis=1)
        ib = 1 - ia
        rr = np.arange(sub.size)
        for lo_, hi_, t_, col in ((lo_a, hi_a, t_a, ia), (lo_b, hi_b, t_b, ib)):
            c = cols[rr, col]
            f0, f1 = h_lo[rr, col], h_hi[rr, col]
            left = phi[c] - step
            lo_[sub] = left
            hi_[sub] = left + step
            t_[sub] = left + step * f0 / (f0 - f1)
        margin = hs.max(axis=1)
        weak = margin <= MARGIN_EPS
        if weak.any():
            # the grid maximum only bounds the margin from below
            wi = np.flatnonzero(weak)
            margin[wi] = _margins(body, x[sub][wi], y[sub][wi], hs[wi])[0]
            weak = margin <= MARGIN_EPS
        if weak.any():
            raise PointNotExterior(_not_exterior_msg(x[sub][weak], y[sub][weak], margin[weak]))
    narrow = ~seen
    if narrow.any():
        # the positive arc fell between grid nodes (or is empty)
        idx = np.flatnonzero(narrow)
        margin, tstar = _margins(body, x[idx], y[idx], hv[idx])
        bad = ~(margin > MARGIN_EPS)
        if bad.any():
            raise PointNotExterior(_not_exterior_msg(x[idx][bad], y[idx][bad], margin[bad]))
        lo_b[idx], hi_b[idx] = tstar, tstar + math.pi
        lo_a[idx], hi_a[idx] = tstar - math.pi, tstar
        t_b[idx] = 0.5 * (lo_b[idx] + hi_b[idx])
        t_a[idx] = 0.5 * (lo_a[idx] + hi_a[idx])
    phi_b = _solve(body, x, y, lo_b, hi_b, t_b, decreasing=True)
    phi_a = _solve(body, x, y, lo_a, hi_a, t_a, decreasing=False)
    return np.mod(phi_a, TWO_PI), np.mod(phi_b, TWO_PI)


def _not_exterior_msg(x, y, margin):
    return f"point ({x[0]:.6g}, {y[0]:.6g}) is not strictly exterior (margin {margin[0]:.3g})"


def _direction_terms(x, y, phi):
    """cos and sin of the direction angle of the line through (x, y) with normal phi."""
    d = np.hypot(x, y)
    # u = (y, -x)/|OP| is orthogonal to OP with (u, OP) positively oriented
    ux, uy = y / d, -x / d
    vx, vy = -np.sin(phi), np.cos(phi)
    det = ux * vy - uy * vx
    dot = ux * vx + uy * vy
    flip = np.where(det < 0, -1.0, 1.0)
    return dot * flip, det * flip


def direction_angle(P, phi_normal: float) -> float:
    """Direction angle in (0, pi) of the line through ``P`` with normal angle ``phi_normal``.

    Lines carry no orientation, so this is the angle mod pi. In
    :class:`VisualAngleBatch` the two support-line angles are unwrapped to
    alpha = pi/2 - omega1 and beta = pi/2 + omega2.

    ``u`` is the unit vector orthogonal to OP with (u, OP) positive, ``v``
    the unit director of the line with (u, v) positive, and the angle is
    measured from ``u`` to ``v``.
    """
    x, y = float(P[0]), float(P[1])
    if x == 0.0 and y == 0.0:
        raise DegenerateDirection("direction angle is undefined at the origin")
    cos_a, sin_a = _direction_terms(np.float64(x), np.float64(y), np.float64(phi_normal))
    if sin_a == 0.0:
        raise DegenerateDirection("line is perpendicular to OP; direction is 0 or pi")
    return float(math.atan2(sin_a, cos_a))


def visual_angles(body: SupportBody, x, y) -> VisualAngleBatch:
    """Visual-angle data for arrays of strictly exterior points.

    Raises :class:`PointNotExterior` if any point has margin <= 1e-9.
    """
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if np.any((x == 0) & (y == 0)):
        raise DegenerateDirection("the origin is not an exterior point")
    parts = [_tangent_chunk(body, x[i:i + BATCH], y[i:i + BATCH]) for i in range(0, x.size, BATCH)]
    phi_a = np.concatenate([p[0] for p in parts]) if parts else np.zeros(0)
    phi_b = np.concatenate([p[1] for p in parts]) if parts else np.zeros(0)
    gap = np.abs(phi_a - phi_b)
    delta = np.minimum(gap, TWO_PI - gap)
    omega = math.pi - delta
    ca, sa = _direction_terms(x, y, phi_a)
    cb, sb = _direction_terms(x, y, phi_b)
    # pi/2 - (direction angle), free of cancellation; line directions are
    # only defined mod pi, and each part of the split lies in (0, pi)
    w_a = np.arctan2(ca, sa)
    w_b = np.arctan2(cb, sb)
    a_first = (np.mod(w_a, math.pi), np.mod(-w_b, math.pi))
    b_first = (np.mod(w_b, math.pi), np.mod(-w_a, math.pi))
    # the labelling that follows the tangent half-lines sums to omega < pi;
    # the other one sums to 2 pi - omega
    pick = a_first[0] + a_first[1] <= b_first[0] + b_first[1]
    omega1 = np.where(pick, a_first[0], b_first[0])
    omega2 = np.where(pick, a_first[1], b_first[1])
    alpha = HALF_PI - omega1
    beta = HALF_PI + omega2
    return VisualAngleBatch(phi_a, phi_b, omega, alpha, beta, omega1, omega2)


def exterior_margins(body: SupportBody, x, y) -> np.ndarray:
    """max over phi of P.u(phi) - p(phi) for each point; zero on the boundary."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    return _margins(body, x, y)[0]


def is_exterior(body: SupportBody, P):
    """``(flag, margin)`` with margin = max over phi of P.u(phi) - p(phi)."""
    x = np.array([float(P[0])])
    y = np.array([float(P[1])])
    margin = float(_margins(body, x, y)[0][0])
    return margin > MARGIN_EPS, margin


def tangent_normals(body: SupportBody, P):
    """Outward normal angles in [0, 2pi) of the two support lines through ``P``."""
    batch = visual_angles(body, [P[0]], [P[1]])
    return float(batch.phi_a[0]), float(batch.phi_b[0])


def visual_angle(body: SupportBody, P) -> float:
    return float(visual_angles(body, [P[0]], [P[1]]).omega[0])


def omega_split(body: SupportBody, P):
    batch = visual_angles(body, [P[0]], [P[1]])
    return float(batch.omega1[0]), float(batch.omega2[0])


def probe(body: SupportBody, P) -> VisualAngleData:
    b = visual_angles(body, [P[0]], [P[1]])
    return VisualAngleData(
        point=PlanarPoint(float(P[0]), float(P[1])),
        normal_angles=(float(b.phi_a[0]), float(b.phi_b[0])),
        direction_angles=(float(b.alpha[0]), float(b.beta[0])),
        omega=float(b.omega[0]),
        omega1=float(b.omega1[0]),
        omega2=float(b.omega2[0]),
    )


def polyline_visual_angle(boundary: np.ndarray, P) -> float:
    """Angle subtended at ``P`` by a dense closed boundary polyline.

    Independent check: directions of P->Q are measured relative to the
    direction P->O, which points into the body, so no branch cut is crossed.
    """
    px, py = float(P[0]), float(P[1])
    ref = math.atan2(-py, -px)
    ang = np.arctan2(boundary[:, 1] - py, boundary[:, 0] - px) - ref
    ang = (ang + math.pi) % TWO_PI - math.pi
    return float(ang.max() - ang.min())
