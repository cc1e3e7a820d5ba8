"""Lines, angular densities and the measure of line pairs meeting a body.

A line is stored by the polar coordinates (p, phi) of its foot point; it
meets the body exactly when p <= p_body(phi). For a density f(phi2 - phi1)
the pair measure over lines meeting K is

    int int p(phi1) p(phi2) f(phi2 - phi1) dphi1 dphi2
        = A_0 L^2 + pi^2 sum_n A_n c_n^2,

with A_0 the mean of f and A_n its cosine coefficients. Both sides are
evaluated here independently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .errors import BadParam, UnknownDensity
from .geometry import SupportBody, make_body, support_eval
from .numerics import TWO_PI, QuadResult, fourier_coefficients, periodic_quad_2d
from .special import power_sine_A

PI_PERIODIC = "pi_periodic"
ANTI_PI_PERIODIC = "anti_pi_periodic"
GENERAL_2PI = "general_2pi"

DIRECT_N0 = 64
DIRECT_NMAX = 2**12
NUMERIC_N = 2**14
DENSITY_NAMES = ("const", "abs_sin_4", "abs_cos", "power_sine", "hurwitz", "cos")


class LineCoords(NamedTuple):
    """Line {x : x . u(phi) = p} with p >= 0 and phi in [0, 2 pi)."""

    p: float
    phi: float


def line_coords(p: float, phi: float) -> LineCoords:
    """Normalise to p >= 0, phi in [0, 2 pi)."""
    if p < 0:
        p, phi = -p, phi + math.pi
    return LineCoords(float(p), float(phi % TWO_PI))


def line_through(P, direction: float) -> LineCoords:
    """Line through point P with direction angle ``direction``."""
    nx, ny = -math.sin(direction), math.cos(direction)
    return line_coords(P[0] * nx + P[1] * ny, math.atan2(ny, nx))


def hits(body: SupportBody, line: LineCoords) -> bool:
    return line.p <= float(support_eval(body, line.phi, 0)[0])


@dataclass(frozen=True)
class AngularDensity:
    """Density f(phi2 - phi1) on line pairs.

    ``coeff(n)`` is the closed-form cosine coefficient with ``coeff(0)`` the
    mean, so that f = coeff(0) + sum coeff(n) cos(n x). Catalogued densities
    are even, so all sine coefficients vanish. ``kinks`` lists points of
    [0, pi) where f is not smooth.
    """

    id: str
    func: Callable
    periodicity_class: str
    even: bool = True
    coeff: Optional[Callable[[int], float]] = None
    kinks: Tuple[float, ...] = ()
    params: dict = field(default_factory=dict, compare=False, hash=False)

    def __call__(self, x):
        return self.func(x)

    @property
    def closed_form(self) -> bool:
        return self.coeff is not None

    def A(self, kmax: int) -> np.ndarray:
        """A[0..kmax]: closed form when available, else numeric."""
        if self.coeff is None:
            return self.numeric_A(kmax)[0]
        return np.array([self.coeff(n) for n in range(kmax + 1)], dtype=float)

    def B(self, kmax: int) -> np.ndarray:
        if self.coeff is None:
            return self.numeric_A(kmax)[1]
        return np.zeros(kmax + 1)

    def numeric_A(self, kmax: int, n: int = NUMERIC_N):
        """Numeric (A[0..kmax], B[0..kmax]) from kink-aligned DFTs."""
        a0, a, b = fourier_coefficients(self.func, max(kmax, 1), n=n)
        A = np.concatenate([[a0], a])[:kmax + 1]
        B = np.concatenate([[0.0], b])[:kmax + 1]
        return A, B


def _abs_sin_4_coeff(n: int) -> float:
    if n % 2:
        return 0.0
    if n == 0:
        return 8.0 / math.pi
    return (16.0 / math.pi) / (1.0 - n * n)


def _abs_cos_coeff(n: int) -> float:
    if n % 2:
        return 0.0
    if n == 0:
        return 2.0 / math.pi
    sign = -1.0 if (n // 2) % 2 else 1.0
    return sign * (4.0 / math.pi) / (1.0 - n * n)


def _int_param(value, name: str, low: int) -> int:
    try:
        k = int(value)
    except (TypeError, ValueError):
        raise BadParam(f"{name} must be an integer, got {value!r}") from None
    if k != float(value) or k < low:
        raise BadParam(f"{name} must be an integer >= {low}, got {value!r}")
    return k


def const_density() -> AngularDensity:
    return AngularDensity("const", lambda x: np.ones_like(np.asarray(x, dtype=float)),
                          PI_PERIODIC, coeff=lambda n: 1.0 if n == 0 else 0.0)


def abs_sin_4_density() -> AngularDensity:
    return AngularDensity("abs_sin_4", lambda x: 4.0 * np.abs(np.sin(x)), PI_PERIODIC,
                          coeff=_abs_sin_4_coeff, kinks=(0.0,))


def abs_cos_density() -> AngularDensity:
    return AngularDensity("abs_cos", lambda x: np.abs(np.cos(x)), PI_PERIODIC,
                          coeff=_abs_cos_coeff, kinks=(0.5 * math.pi,))


def power_sine_density(m: int) -> AngularDensity:
    """m(m-1)|sin x|^(m-3) - m^2 |sin x|^(m-1), the density of sin^m(omega)."""
    m = _int_param(m, "m", 3)

    def f(x):
        s = np.abs(np.sin(x))
        return m * (m - 1) * s ** (m - 3) - m * m * s ** (m - 1)

    def coeff(n: int) -> float:
        val = power_sine_A(m, n)
        return 0.5 * val if n == 0 else val

    # odd powers of |sin| are kinked at multiples of pi
    kinks = (0.0,) if m % 2 == 0 else ()
    return AngularDensity(f"power_sine:{m}", f, PI_PERIODIC, coeff=coeff, kinks=kinks,
                          params={"m": m})


def hurwitz_density(k: int) -> AngularDensity:
    """1 + (-1)^k (k^2 - 1) cos(kx), the density of Hurwitz's f_k."""
    k = _int_param(k, "k", 2)
    amp = (k * k - 1.0) * (1.0 if k % 2 == 0 else -1.0)
    cls = PI_PERIODIC if k % 2 == 0 else GENERAL_2PI

    def coeff(n: int) -> float:
        return 1.0 if n == 0 else (amp if n == k else 0.0)

    return AngularDensity(f"hurwitz:{k}", lambda x: 1.0 + amp * np.cos(k * np.asarray(x)), cls,
                          coeff=coeff, params={"k": k})


def cos_density(k: int) -> AngularDensity:
    """cos(kx); k = 1 is allowed as the non-invariant witness."""
    k = _int_param(k, "k", 1)
    cls = PI_PERIODIC if k % 2 == 0 else ANTI_PI_PERIODIC
    return AngularDensity(f"cos:{k}", lambda x: np.cos(k * np.asarray(x)), cls,
                          coeff=lambda n: 1.0 if n == k else 0.0, params={"k": k})


def density_catalog(name: str, params: Optional[dict] = None) -> AngularDensity:
    """Catalogued density by name with ``params`` ({"m": ..} or {"k": ..})."""
    params = params or {}
    if name == "const":
        return const_density()
    if name == "abs_sin_4":
        return abs_sin_4_density()
    if name == "abs_cos":
        return abs_cos_density()
    if name == "power_sine":
        if "m" not in params:
            raise BadParam("power_sine needs parameter m")
        return power_sine_density(params["m"])
    if name == "hurwitz":
        if "k" not in params:
            raise BadParam("hurwitz needs parameter k")
        return hurwitz_density(params["k"])
    if name == "cos":
        if "k" not in params:
            raise BadParam("cos needs parameter k")
        return cos_density(params["k"])
    raise UnknownDensity(f"unknown density {name!r}; known: {', '.join(DENSITY_NAMES)}")


def parse_density(spec: str) -> AngularDensity:
    """Parse ``const | abs_sin_4 | abs_cos | power_sine:m | hurwitz:k | cos:k``."""
    name, _, arg = spec.strip().partition(":")
    if name in ("power_sine",):
        return density_catalog(name, {"m": arg} if arg else {})
    if name in ("hurwitz", "cos"):
        return density_catalog(name, {"k": arg} if arg else {})
    if arg:
        raise BadParam(f"density {name!r} takes no parameter")
    return density_catalog(name)


def standard_densities() -> List[AngularDensity]:
    """One representative of each catalogued family."""
    return [const_density(), abs_sin_4_density(), abs_cos_density(),
            power_sine_density(3), hurwitz_density(2), cos_density(2)]


def pair_measure_fourier(body: SupportBody, density: AngularDensity) -> float:
    """A_0 L^2 + pi^2 sum_{n>=1} A_n c_n^2, truncated at the body's K_max.

    Sine coefficients of f contribute nothing: the sine part of f(phi2-phi1)
    integrates to zero against p(phi1) p(phi2).
    """
    A = density.A(body.kmax)
    L = TWO_PI * body.a0
    terms = [A[0] * L * L]
    terms.extend((math.pi**2 * A[1:] * body.c_sq[1:]).tolist())
    return math.fsum(terms)


def pair_measure_terms(body: SupportBody, density: AngularDensity) -> dict:
    """Per-harmonic contributions to :func:`pair_measure_fourier`."""
    A = density.A(body.kmax)
    L = TWO_PI * body.a0
    out = {"A0_L2": float(A[0] * L * L)}
    for n in range(1, body.kmax + 1):
        if A[n] != 0.0 and body.c_sq[n] != 0.0:
            out[f"pi2_A{n}_c{n}sq"] = float(math.pi**2 * A[n] * body.c_sq[n])
    return out


def _direct_n0(body: SupportBody) -> int:
    n = DIRECT_N0
    while n < 4 * max(body.kmax, 1):
        n *= 2
    return n


def pair_measure_direct(body: SupportBody, density: AngularDensity,
                        tol: float = 1e-11) -> QuadResult:
    """Tensor trapezoid rule for int int p(phi1) p(phi2) f(phi2 - phi1).

    Grid sizes are multiples of 4, so the kink lines phi2 - phi1 = 0, pi/2
    (mod pi) of the |sin| / |cos| family pass through nodes; the error then
    expands in even powers of the step and Romberg extrapolation restores
    high order.
    """

    def integrand(phi1, phi2):
        p1 = support_eval(body, phi1, 0)[0]
        p2 = support_eval(body, phi2, 0)[0]
        return p1 * p2 * density(phi2 - phi1)

    return periodic_quad_2d(integrand, tol=tol, n0=_direct_n0(body), nmax=DIRECT_NMAX,
                            extrapolate=True, atol=tol * pair_scale(body, density))


def pair_scale(body: SupportBody, density: AngularDensity) -> float:
    """Natural magnitude L^2 max|f| of a pair measure; used where the value is 0."""
    x = np.arange(4096) * (TWO_PI / 4096)
    L = TWO_PI * body.a0
    return L * L * float(np.max(np.abs(density(x))))


def rigid_motion(body: SupportBody, theta: float, v: Sequence[float] = (0.0, 0.0)) -> SupportBody:
    """Rotate by ``theta`` about the origin, then translate by ``v``.

    p_new(phi) = p(phi - theta) + v . u(phi). Raises NotPositive when the
    origin is no longer interior.
    """
    K = max(body.kmax, 1)
    k = np.arange(1, K + 1)
    a = np.zeros(K)
    b = np.zeros(K)
    a[:body.kmax] = body.cos_coeffs
    b[:body.kmax] = body.sin_coeffs
    c, s = np.cos(k * theta), np.sin(k * theta)
    a_new = a * c - b * s
    b_new = a * s + b * c
    a_new[0] += v[0]
    b_new[0] += v[1]
    return make_body(body.a0, a_new, b_new, name=body.name)


def random_motions(body: SupportBody, n: int, seed: int = 0) -> List[Tuple[float, Tuple[float, float]]]:
    """``n`` rotations with translations of norm below half of min p."""
    rng = np.random.default_rng(seed)
    phi = np.arange(4096) * (TWO_PI / 4096)
    pmin = float(support_eval(body, phi, 0)[0].min())
    out = []
    for _ in range(n):
        theta = float(rng.uniform(0.0, TWO_PI))
        r = float(rng.uniform(0.0, 0.5 * pmin))
        t = float(rng.uniform(0.0, TWO_PI))
        out.append((theta, (r * math.cos(t), r * math.sin(t))))
    return out


@dataclass
class InvarianceResult:
    """Pair measure before and after each motion.

    ``expected_invariant`` is True only for pi-periodic densities; for the
    others the deviation is a witness of non-invariance, not an error.
    """

    base: float
    values: List[float]
    max_abs: float
    max_rel: float
    max_csq_rel: float
    expected_invariant: bool


def invariance_check(body: SupportBody, density: AngularDensity,
                     motions: Iterable[Tuple[float, Sequence[float]]]) -> InvarianceResult:
    base = pair_measure_fourier(body, density)
    ref_csq = body.c_sq[2:]
    values, csq_dev = [], [0.0]
    for theta, v in motions:
        moved = rigid_motion(body, theta, v)
        values.append(pair_measure_fourier(moved, density))
        scale = max(float(np.max(ref_csq, initial=0.0)), 1e-30)
        csq_dev.append(float(np.max(np.abs(moved.c_sq[2:body.kmax + 1] - ref_csq), initial=0.0)) / scale)
    devs = [abs(v - base) for v in values]
    max_abs = max(devs, default=0.0)
    max_rel = max_abs / max(abs(base), 1e-30)
    return InvarianceResult(base, values, max_abs, max_rel, max(csq_dev),
                            density.periodicity_class == PI_PERIODIC)
