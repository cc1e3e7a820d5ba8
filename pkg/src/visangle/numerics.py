"""Quadrature and reduction primitives.

Every floating-point reduction in the package goes through :func:`csum`
(``math.fsum``, exactly rounded), so totals do not depend on summation
order or on how work was split between threads.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, List, Sequence

import numpy as np

from .errors import NoConvergence

TWO_PI = 2.0 * math.pi

# doubling limits for the periodic trapezoid rules
PERIODIC_N0 = 64
PERIODIC_NMAX = 2**20
PERIODIC_NMAX_2D = 2**12
ROW_CHUNK = 256


def csum(values) -> float:
    """Exactly rounded sum of an array or iterable of floats."""
    if isinstance(values, np.ndarray):
        return math.fsum(values.ravel().tolist())
    return math.fsum(values)


def worker_count() -> int:
    """Number of worker threads, capped by the ``VAL_THREADS`` variable."""
    raw = os.environ.get("VAL_THREADS", "").strip()
    if raw:
        try:
            n = int(raw)
        except ValueError:
            n = 1
        return max(1, n)
    return max(1, min(4, os.cpu_count() or 1))


def ordered_map(fn: Callable, items: Sequence, workers: int | None = None) -> list:
    """Map ``fn`` over ``items`` and return results in input order.

    Work items are whatever the caller passes in; partitioning is therefore
    fixed by the caller and the result is independent of ``workers``.
    """
    items = list(items)
    n = worker_count() if workers is None else workers
    if n <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(n, len(items))) as pool:
        return list(pool.map(fn, items))


@lru_cache(maxsize=None)
def gauss_legendre(n: int):
    """Gauss-Legendre nodes and weights on [-1, 1] (read-only arrays)."""
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gl_panels(a: float, b: float, panels: int, order: int = 16):
    """Composite Gauss-Legendre rule on [a, b] with equal panels."""
    x, w = gauss_legendre(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def gl_integrate(f: Callable, a: float, b: float, panels: int = 8, order: int = 16,
                 breakpoints: Iterable[float] = ()) -> float:
    """Fixed composite Gauss-Legendre integral, split at ``breakpoints``."""
    cuts = [a] + sorted(t for t in breakpoints if a < t < b) + [b]
    parts = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        x, w = gl_panels(lo, hi, panels, order)
        parts.extend((w * f(x)).tolist())
    return math.fsum(parts)


@dataclass
class QuadResult:
    """Value of a quadrature together with how it was obtained."""

    value: float
    n: int
    change: float
    history: List[float] = field(default_factory=list)

    def __float__(self) -> float:
        return self.value


def _richardson(table: List[List[float]], t_new: float) -> List[float]:
    # Romberg row for the even-power error expansion of the trapezoid rule
    row = [t_new]
    prev = table[-1] if table else []
    for j, older in enumerate(prev):
        factor = 4.0 ** (j + 1)
        row.append(row[j] + (row[j] - older) / (factor - 1.0))
    return row


def _converged(change: float, value: float, tol: float, atol: float) -> bool:
    return change <= max(tol * abs(value), atol)


def periodic_quad(f: Callable, tol: float = 1e-12, n0: int = PERIODIC_N0,
                  nmax: int = PERIODIC_NMAX, period: float = TWO_PI,
                  extrapolate: bool = False, atol: float = 0.0) -> QuadResult:
    """Trapezoid rule over one period with grid doubling.

    ``f`` must accept a numpy array of abscissae. Samples are reused between
    levels. With ``extrapolate`` the estimates are Richardson-extrapolated,
    which restores high order for integrands whose kinks fall on grid nodes.
    """
    n = n0
    samples = [csum(np.asarray(f(np.arange(n) * (period / n)), dtype=float))]
    table: List[List[float]] = []
    history: List[float] = []
    best = prev_best = None
    while True:
        t = period / n * math.fsum(samples)
        row = _richardson(table, t) if extrapolate else [t]
        table.append(row)
        best = row[-1]
        history.append(best)
        if prev_best is not None:
            change = abs(best - prev_best)
            if _converged(change, best, tol, atol):
                return QuadResult(best, n, change, history)
        if 2 * n > nmax:
            raise NoConvergence(f"periodic_quad did not reach tol={tol:g} with N={n}")
        prev_best = best
        mid = (np.arange(n) + 0.5) * (period / n)
        samples.append(csum(np.asarray(f(mid), dtype=float)))
        n *= 2


def trapezoid_2d(f: Callable, n: int, period: float = TWO_PI) -> float:
    """Tensor trapezoid sum on an n-by-n periodic grid, reduced row by row."""
    h = period / n
    grid = np.arange(n) * h
    col = grid[None, :]
    row_sums: List[float] = []
    for start in range(0, n, ROW_CHUNK):
        rows = grid[start:start + ROW_CHUNK, None]
        block = np.asarray(f(rows, col), dtype=float)
        block = np.broadcast_to(block, (rows.shape[0], n))
        row_sums.extend(math.fsum(r) for r in block.tolist())
    return h * h * math.fsum(row_sums)


def periodic_quad_2d(f: Callable, tol: float = 1e-12, n0: int = PERIODIC_N0,
                     nmax: int = PERIODIC_NMAX_2D, period: float = TWO_PI,
                     extrapolate: bool = False, atol: float = 0.0) -> QuadResult:
    """Doubly periodic trapezoid rule with doubling.

    ``f(phi1, phi2)`` is called with broadcastable arrays (a column of
    ``phi1`` values and a row of ``phi2`` values).
    """
    n = n0
    table: List[List[float]] = []
    history: List[float] = []
    prev_best = None
    while True:
        t = trapezoid_2d(f, n, period)
        row = _richardson(table, t) if extrapolate else [t]
        table.append(row)
        best = row[-1]
        history.append(best)
        if prev_best is not None:
            change = abs(best - prev_best)
            if _converged(change, best, tol, atol):
                return QuadResult(best, n, change, history)
        if 2 * n > nmax:
            raise NoConvergence(f"periodic_quad_2d did not reach tol={tol:g} with N={n}")
        prev_best = best
        n *= 2


def fourier_analyze(samples, kmax: int):
    """Cosine/sine coefficients of a 2*pi-periodic function from uniform samples.

    ``samples[j]`` is the value at ``2*pi*j/N``. Returns ``(a0, a, b)`` with
    ``a[k-1]``, ``b[k-1]`` the coefficients of ``cos(k x)``, ``sin(k x)``.
    These are the trapezoid approximations of the Fourier integrals.
    """
    y = np.asarray(samples, dtype=float)
    n = y.size
    if n < 4 * kmax:
        raise ValueError(f"need at least 4*kmax={4 * kmax} samples, got {n}")
    spec = np.fft.rfft(y) / n
    a0 = float(spec[0].real)
    k = np.arange(1, kmax + 1)
    a = 2.0 * spec[k].real
    b = -2.0 * spec[k].imag
    if n % 2 == 0 and kmax == n // 2:
        a[-1] *= 0.5
    return a0, a, b


def fourier_coefficients(func: Callable, kmax: int, n: int = 2**14, levels: int = 3):
    """Fourier coefficients of ``func`` with Richardson-extrapolated DFTs.

    The DFT is taken on ``n``, ``n/2``, ... uniform samples; with ``n``
    divisible by 4 every multiple of pi/2 is a node, so kinks of the
    ``|sin|``/``|cos|`` family sit on nodes and the error expands in even
    powers of the step. Returns ``(a0, a, b)`` as :func:`fourier_analyze`.
    """
    if n % (4 * 2 ** (levels - 1)):
        raise ValueError("n must be divisible by 4 * 2**(levels-1)")
    x = np.arange(n) * (TWO_PI / n)
    y = np.asarray(func(x), dtype=float)
    estimates = []
    for lev in range(levels):
        step = 2 ** lev
        estimates.append(np.concatenate([[c] if np.ndim(c) == 0 else c
                                         for c in fourier_analyze(y[::step], kmax)]))
    # estimates[0] is the finest grid
    table: List[List[np.ndarray]] = []
    for est in reversed(estimates):
        row = [est]
        if table:
            for j, older in enumerate(table[-1]):
                factor = 4.0 ** (j + 1)
                row.append(row[j] + (row[j] - older) / (factor - 1.0))
        table.append(row)
    best = table[-1][-1]
    return float(best[0]), best[1:kmax + 1], best[kmax + 1:]
