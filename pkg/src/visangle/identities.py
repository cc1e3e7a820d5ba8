"""Visual-angle integral identities, each checked from independent sides.

Every identity pairs an exterior integral of a function of the visual angle
with closed-form body quantities (L, F, c_k^2) or with a pair measure of
lines. The bridge is a function H on [0, pi] with H'' = f sin, H(0) =
H'(0) = 0, where f is the angular density.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from .errors import BadParam, UnknownIdentity
from .exterior import ExteriorIntegrand, disk_radial_oracle, exterior_integral
from .geometry import SupportBody, area, perimeter
from .line_space import (
    PI_PERIODIC, AngularDensity, abs_cos_density, abs_sin_4_density, const_density,
    cos_density, hurwitz_density, pair_measure_direct, pair_measure_fourier,
    pair_scale, power_sine_density, standard_densities,
)
from .numerics import gl_integrate
from .special import power_sine_A, rgamma, sine_power_integral

SERIES_BELOW = 1e-3
SERIES_TERMS = 6
EXT_TOL = 1e-8
PAIR_TOL = 1e-11
REL_FLOOR = 1e-30
H_NUMERIC_DEG = 48
PI = math.pi

__all__ = [
    "hurwitz_f", "h_k", "HFunction", "build_H", "check_H", "power_sine_A", "rgamma",
    "sine_power_integral", "Check", "IdentityReport", "verify", "IDENTITIES",
]


# ---------------------------------------------------------------------------
# functions of the visual angle


def _odd_series(x: np.ndarray, coeffs: Sequence[float], first: int) -> np.ndarray:
    # sum_j coeffs[j] x^(first + 2j), Horner in x^2
    x2 = x * x
    acc = np.zeros_like(x)
    for c in reversed(coeffs):
        acc = acc * x2 + c
    return acc * x**first


def _switch(x, series: Callable, direct: Callable):
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < SERIES_BELOW
    out = direct(x)
    if np.any(small):
        out = np.where(small, series(x), out)
    return out


def crofton_g(w):
    """omega - sin(omega)."""
    coeffs = [(-1) ** (j + 1) / math.factorial(2 * j + 1) for j in range(1, SERIES_TERMS + 1)]
    return _switch(w, lambda x: _odd_series(x, coeffs, 3), lambda x: x - np.sin(x))


def masotti_g(w):
    """omega^2 - sin^2(omega)."""
    # sin^2 x = sum_{n>=1} (-1)^(n+1) 2^(2n-1) x^(2n) / (2n)!
    coeffs = [(-1) ** n * 2.0 ** (2 * n - 1) / math.factorial(2 * n) for n in range(2, SERIES_TERMS + 2)]
    return _switch(w, lambda x: _odd_series(x, coeffs, 4), lambda x: x * x - np.sin(x) ** 2)


def _check_k(k, low: int = 2) -> int:
    if int(k) != k or k < low:
        raise BadParam(f"k must be an integer >= {low}, got {k}")
    return int(k)


def _series_coeffs(k: int, crofton: bool) -> List[float]:
    """x^(2j+1) coefficients, j >= 1, of f_k (plus 2(sin x - x) if ``crofton``)."""
    out = []
    for j in range(1, SERIES_TERMS + 1):
        c = (k + 1) * float(k - 1) ** (2 * j) - (k - 1) * float(k + 1) ** (2 * j)
        if not crofton:
            c -= 2.0
        out.append((-1) ** j / math.factorial(2 * j + 1) * c)
    return out


def hurwitz_f(k: int, w):
    """Hurwitz's f_k(w) = -2 sin w + (k+1)/(k-1) sin((k-1)w) - (k-1)/(k+1) sin((k+1)w)."""
    k = _check_k(k)
    coeffs = _series_coeffs(k, crofton=False)

    def direct(x):
        return (-2.0 * np.sin(x) + (k + 1) / (k - 1) * np.sin((k - 1) * x)
                - (k - 1) / (k + 1) * np.sin((k + 1) * x))

    return _switch(w, lambda x: _odd_series(x, coeffs, 3), direct)


def h_k(k: int, x):
    """H_k with H_k'' = cos(kx) sin(x), H_k(0) = H_k'(0) = 0.

    H_k = (f_k + 2(sin x - x)) / (2(k^2 - 1)) for k >= 2 and
    H_1 = (2x - sin 2x) / 8.
    """
    k = _check_k(k, 1)
    if k == 1:
        coeffs = [(-1) ** (j + 1) * 2.0 ** (2 * j + 1) / (8.0 * math.factorial(2 * j + 1))
                  for j in range(1, SERIES_TERMS + 1)]
        return _switch(x, lambda t: _odd_series(t, coeffs, 3),
                       lambda t: (2.0 * t - np.sin(2.0 * t)) / 8.0)
    scale = 1.0 / (2.0 * (k * k - 1))
    coeffs = [c * scale for c in _series_coeffs(k, crofton=True)]

    def direct(t):
        return scale * (hurwitz_f(k, t) + 2.0 * (np.sin(t) - t))

    return _switch(x, lambda t: _odd_series(t, coeffs, 3), direct)


def power_sine_g(m: int):
    return lambda w: np.sin(w) ** m


# ---------------------------------------------------------------------------
# H functions


@dataclass(frozen=True)
class HFunction:
    """Solution of H'' = f sin on [0, pi] with H(0) = H'(0) = 0."""

    id: str
    func: Callable
    closed_form: bool
    source_density: str

    def __call__(self, x):
        return self.func(x)


def abs_cos_H(x):
    """H for f = |cos|: (x - sin x cos x)/4 up to pi/2, (3x - pi + sin x cos x)/4 after."""
    x = np.asarray(x, dtype=float)
    left = 0.25 * (x - np.sin(x) * np.cos(x))
    right = 0.25 * (3.0 * x - PI + np.sin(x) * np.cos(x))
    # x - sin x cos x = (2x - sin 2x)/2 ~ 2x^3/3 cancels for small x
    small = 0.25 * _odd_series(x, [(-1) ** (j + 1) * 2.0 ** (2 * j) / math.factorial(2 * j + 1)
                                   for j in range(1, SERIES_TERMS + 1)], 3)
    left = np.where(np.abs(x) < SERIES_BELOW, small, left)
    return np.where(x <= 0.5 * PI, left, right)


def _closed_H(density: AngularDensity) -> Optional[Callable]:
    name, _, arg = density.id.partition(":")
    if name == "const":
        return crofton_g
    if name == "abs_sin_4":
        return masotti_g
    if name == "abs_cos":
        return abs_cos_H
    if name == "power_sine":
        return power_sine_g(int(arg))
    if name == "cos":
        k = int(arg)
        return lambda x: h_k(k, x)
    if name == "hurwitz":
        k = int(arg)
        amp = (k * k - 1.0) * (1.0 if k % 2 == 0 else -1.0)
        return lambda x: crofton_g(x) + amp * h_k(k, x)
    return None


def _numeric_H(density: AngularDensity) -> Callable:
    """H(x) = int_0^x (x - s) f(s) sin(s) ds, tabulated as Chebyshev pieces.

    Pieces break at the kinks of f in (0, pi); each stores H(x)/x^3, which
    is smooth and keeps relative accuracy as x -> 0.
    """
    cuts = sorted({0.0, PI} | {t % PI for t in density.kinks if 0.0 < t % PI < PI})

    def exact(x: float) -> float:
        if x <= 0.0:
            return 0.0
        inner = [c for c in cuts if 0.0 < c < x]

        def integrand(s):
            return (x - s) * density(s) * np.sin(s)
        return gl_integrate(integrand, 0.0, x, panels=4, order=24, breakpoints=inner)

    pieces = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        cheb = np.polynomial.chebyshev.Chebyshev.interpolate(
            lambda xs: np.array([exact(float(v)) / float(v) ** 3 for v in np.atleast_1d(xs)]),
            H_NUMERIC_DEG, domain=[lo, hi])
        pieces.append((lo, hi, cheb))

    def H(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for lo, hi, cheb in pieces:
            sel = (x >= lo) & (x <= hi)
            if np.any(sel):
                xs = x[sel]
                out[sel] = cheb(xs) * xs**3
        return out

    return H


def build_H(density: AngularDensity, numeric: bool = False) -> HFunction:
    """H for ``density``; closed form for catalogued densities unless ``numeric``."""
    closed = None if numeric else _closed_H(density)
    if closed is not None:
        return HFunction(f"H[{density.id}]", closed, True, density.id)
    return HFunction(f"H[{density.id}]~num", _numeric_H(density), False, density.id)


def check_H(H: HFunction, density: AngularDensity, points: int = 64, step: float = 1e-3) -> dict:
    """Initial conditions and H'' = f sin by five-point central differences."""
    x = (np.arange(points) + 0.5) * (PI / points)
    d2 = (-H(x + 2 * step) + 16.0 * H(x + step) - 30.0 * H(x) + 16.0 * H(x - step)
          - H(x - 2 * step)) / (12.0 * step**2)
    resid = float(np.max(np.abs(d2 - density(x) * np.sin(x))))
    h = np.array([1e-2, 1e-3])
    cubic = np.abs(H(h)) / h**3
    return {"H0": float(H(np.array([0.0]))[0]), "cubic_ratio": cubic.tolist(),
            "d2_residual": resid}


# ---------------------------------------------------------------------------
# reports


@dataclass
class Check:
    """One compared pair of independently computed numbers.

    ``kind`` is "identity" for a statement proved in full, "derivation_chain"
    for an intermediate step of a proof, "structural" for closed-form facts
    and "diagnostic" for reported-only values. ``metric`` says how ``err`` is
    formed: "rel" (relative), "scaled" (absolute over ``scale``, used where
    the exact value is 0) or "abs".
    """

    name: str
    kind: str
    lhs: float
    rhs: float
    threshold: float
    metric: str = "rel"
    scale: float = 1.0
    abs_err: float = 0.0
    rel_err: float = 0.0
    err: float = 0.0

    def __post_init__(self):
        self.abs_err = abs(self.lhs - self.rhs)
        self.rel_err = rel_err(self.lhs, self.rhs)
        if self.metric == "rel":
            self.err = self.rel_err
        elif self.metric == "scaled":
            self.err = self.abs_err / self.scale
        else:
            self.err = self.abs_err

    @property
    def passed(self) -> bool:
        return self.kind == "diagnostic" or self.err <= self.threshold


def rel_err(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), REL_FLOOR)


@dataclass
class IdentityReport:
    """Result of one :func:`verify` run; the first check is the headline."""

    identity: str
    body: str
    params: dict
    lhs: float
    rhs: float
    abs_err: float
    rel_err: float
    checks: List[Check]
    terms: Dict[str, float]
    meta: dict
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failing(self) -> List[Check]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self, timings: bool = False) -> dict:
        out = asdict(self)
        out["passed"] = self.passed
        if not timings:
            out["wall_time"] = None
        return out


def _report(identity: str, body: SupportBody, params: dict, checks: List[Check],
            terms: dict, meta: dict) -> IdentityReport:
    head = checks[0]
    return IdentityReport(identity, body.describe(), dict(params), head.lhs, head.rhs,
                          head.abs_err, head.rel_err, checks, terms, meta)


# ---------------------------------------------------------------------------
# identities


def _is_centred_disk(body: SupportBody) -> bool:
    return body.kmax == 0


def _ext(body: SupportBody, id_: str, func: Callable, tol: float, split: bool = False):
    return exterior_integral(body, ExteriorIntegrand(id_, func, split=split), tol=tol)


def _ext_meta(meta: dict, key: str, res) -> float:
    meta[key] = res.meta()
    return res.value


def _base(body: SupportBody):
    return perimeter(body), area(body)


def _crofton(body, params, ext_tol, pair_tol):
    L, F = _base(body)
    meta: dict = {}
    I = _ext_meta(meta, "exterior", _ext(body, "crofton", crofton_g, ext_tol))
    checks = [Check("crofton", "identity", 2 * I + 2 * PI * F, L * L, 1e-5)]
    if _is_centred_disk(body):
        oracle = disk_radial_oracle(crofton_g, body.a0)
        checks.append(Check("disk_radial_oracle", "identity", I, oracle, 1e-5))
    terms = {"exterior": I, "L": L, "F": F, "2piF": 2 * PI * F, "L2": L * L}
    return checks, terms, meta


def _cauchy_crofton(body, params, ext_tol, pair_tol):
    L, _ = _base(body)
    direct = pair_measure_direct(body, const_density(), tol=pair_tol)
    fourier = pair_measure_fourier(body, const_density())
    checks = [Check("direct_vs_L2", "identity", direct.value, L * L, 1e-12),
              Check("fourier_vs_L2", "identity", fourier, L * L, 1e-12)]
    return checks, {"direct": direct.value, "fourier": fourier, "L2": L * L}, {"direct_n": direct.n}


def _hurwitz_rhs(body: SupportBody, k: int) -> float:
    L = perimeter(body)
    csq = body.c_sq[k] if k <= body.kmax else 0.0
    return L * L + (-1) ** k * PI**2 * (k * k - 1) * csq


def _hurwitz_even(body, params, ext_tol, pair_tol):
    k = _check_k(params.get("k", 2))
    if k % 2:
        raise BadParam("hurwitz_even needs even k")
    rhs = _hurwitz_rhs(body, k)
    meta: dict = {}
    I = _ext_meta(meta, "exterior", _ext(body, f"f_{k}", lambda w: hurwitz_f(k, w), ext_tol))
    dens = hurwitz_density(k)
    direct = pair_measure_direct(body, dens, tol=pair_tol)
    fourier = pair_measure_fourier(body, dens)
    meta["direct_n"] = direct.n
    checks = [Check("exterior_route", "identity", I, rhs, 1e-4),
              Check("density_direct", "identity", direct.value, rhs, 1e-8),
              Check("density_fourier", "identity", fourier, rhs, 1e-8)]
    csq = float(body.c_sq[k]) if k <= body.kmax else 0.0
    terms = {"exterior": I, "L2": perimeter(body) ** 2, "c_sq_k": csq,
             "pi2_k2m1_csq": PI**2 * (k * k - 1) * csq}
    return checks, terms, meta


def _split_H(k: int):
    return lambda a, b: h_k(k, a) + h_k(k, b)


def _f_form(k: int):
    def g(a, b):
        return (hurwitz_f(k, a) - 2.0 * crofton_g(a) + hurwitz_f(k, b) - 2.0 * crofton_g(b))
    return g


def _hurwitz_odd(body, params, ext_tol, pair_tol):
    k = _check_k(params.get("k", 3), 3)
    if k % 2 == 0:
        raise BadParam("hurwitz_odd_consistency needs odd k")
    L, F = _base(body)
    meta: dict = {}
    S = _ext_meta(meta, "split_H", _ext(body, f"H_{k}(w1)+H_{k}(w2)", _split_H(k), ext_tol, True))
    M = _ext_meta(meta, "f_form", _ext(body, f"f_form_{k}", _f_form(k), ext_tol, True))
    I = _ext_meta(meta, "exterior_f", _ext(body, f"f_{k}", lambda w: hurwitz_f(k, w), ext_tol))
    csq = float(body.c_sq[k]) if k <= body.kmax else 0.0
    assembled = L * L - PI**2 * (k * k - 1) * csq - 2 * PI * F + 2 * (k * k - 1) * S
    checks = [Check("split_equals_piF", "derivation_chain", (k * k - 1) * S, PI * F, 1e-4),
              Check("split_f_form_equals_2piF", "derivation_chain", M, 2 * PI * F, 1e-4),
              Check("hurwitz_eq_odd", "identity", I, _hurwitz_rhs(body, k), 1e-4),
              Check("assembled_from_split", "derivation_chain", I, assembled, 1e-4)]
    if _is_centred_disk(body):
        oracle = disk_radial_oracle(_split_H(k), body.a0, split=True)
        checks.append(Check("disk_split_oracle", "identity", S, oracle, 1e-5))
        if k == 3 and body.a0 == 1.0:
            checks.append(Check("disk_split_target", "identity", S, PI**2 / 8, 1e-4))
    terms = {"split_integral": S, "k2m1_split": (k * k - 1) * S, "piF": PI * F,
             "f_form_integral": M, "exterior_f": I, "c_sq_k": csq}
    return checks, terms, meta


def masotti_rhs(body: SupportBody) -> float:
    L, F = _base(body)
    terms = [-PI**2 * F, 4 * L * L / PI]
    for n in range(1, body.kmax // 2 + 1):
        terms.append(8 * PI * body.c_sq[2 * n] / (1 - 4 * n * n))
    return math.fsum(terms)


def _masotti(body, params, ext_tol, pair_tol):
    L, F = _base(body)
    meta: dict = {}
    I = _ext_meta(meta, "exterior", _ext(body, "masotti", masotti_g, ext_tol))
    rhs = masotti_rhs(body)
    dens = abs_sin_4_density()
    direct = pair_measure_direct(body, dens, tol=pair_tol)
    fourier = pair_measure_fourier(body, dens)
    # 2 int |sin| dG1 dG2 = pair(4|sin|) / 2
    via_density = -PI**2 * F + 0.5 * direct.value
    meta["direct_n"] = direct.n
    checks = [Check("masotti", "identity", I, rhs, 1e-4),
              Check("density_form", "identity", I, via_density, 1e-4),
              Check("series_vs_density", "structural", rhs, -PI**2 * F + 0.5 * fourier, 1e-12)]
    if _is_centred_disk(body):
        checks.append(Check("disk_radial_oracle", "identity", I,
                            disk_radial_oracle(masotti_g, body.a0), 1e-5))
    terms = {"exterior": I, "-pi2F": -PI**2 * F, "4L2/pi": 4 * L * L / PI,
             "series": rhs + PI**2 * F - 4 * L * L / PI, "pair_abs_sin": 0.25 * direct.value}
    return checks, terms, meta


def power_sine_L2_coeff(m: int) -> float:
    """m! / (2^m (m-2) Gamma((m+1)/2)^2), the L^2 coefficient for sin^m."""
    return math.factorial(m) / (2.0**m * (m - 2)) * rgamma(0.5 * (m + 1)) ** 2


def power_sine_rhs(body: SupportBody, m: int) -> float:
    L = perimeter(body)
    terms = [power_sine_L2_coeff(m) * L * L]
    for k in range(2, body.kmax + 1, 2):
        terms.append(0.5 * PI**2 * power_sine_A(m, k) * body.c_sq[k])
    return math.fsum(terms)


def _power_sine(body, params, ext_tol, pair_tol):
    m = int(params.get("m", 3))
    dens = power_sine_density(m)
    L = perimeter(body)
    meta: dict = {}
    I = _ext_meta(meta, "exterior", _ext(body, f"sin^{m}", power_sine_g(m), ext_tol))
    rhs = power_sine_rhs(body, m)
    direct = pair_measure_direct(body, dens, tol=pair_tol)
    meta["direct_n"] = direct.n
    checks = [Check("power_sine", "identity", I, rhs, 1e-4),
              Check("density_form", "identity", I, 0.5 * direct.value, 1e-4),
              Check("L2_coeff_vs_mean", "structural", power_sine_L2_coeff(m),
                    0.25 * power_sine_A(m, 0), 1e-14)]
    if m % 2:
        # reciprocal Gamma poles end the series at k = m - 1
        beyond = [abs(power_sine_A(m, k)) for k in range(m + 1, max(m + 1, body.kmax) + 41)]
        checks.append(Check("pole_truncation", "structural", max(beyond), 0.0, 0.0, metric="abs"))
    if _is_centred_disk(body):
        checks.append(Check("disk_radial_oracle", "identity", I,
                            disk_radial_oracle(power_sine_g(m), body.a0), 1e-5))
    printed = (math.factorial(m) / (2.0**m * (m - 2)) * rgamma(0.5 * (m - 1)) ** 2)
    terms = {"exterior": I, "L2_coeff": power_sine_L2_coeff(m), "L2_term": power_sine_L2_coeff(m) * L * L,
             "series": rhs - power_sine_L2_coeff(m) * L * L,
             "L2_coeff_gamma_m_minus_1": printed}
    return checks, terms, meta


def _abs_cos(body, params, ext_tol, pair_tol):
    _, F = _base(body)
    meta: dict = {}
    dens = abs_cos_density()
    I = _ext_meta(meta, "exterior", _ext(body, "H_abs_cos", abs_cos_H, ext_tol))
    direct = pair_measure_direct(body, dens, tol=pair_tol)
    meta["direct_n"] = direct.n
    left = 0.25 * (0.5 * PI - math.sin(0.5 * PI) * math.cos(0.5 * PI))
    right = 0.25 * (1.5 * PI - PI + math.sin(0.5 * PI) * math.cos(0.5 * PI))
    checks = [Check("abs_cos", "identity", direct.value, PI * F + 2 * I, 1e-4),
              Check("H_continuity_pi_2", "structural", left, right, 1e-12, metric="abs"),
              Check("H_at_pi_2", "structural", left, PI / 8, 1e-12, metric="abs")]
    terms = {"pair_measure": direct.value, "piF": PI * F, "exterior_H": I}
    return checks, terms, meta


def _theorem2(body, params, ext_tol, pair_tol):
    densities = params.get("densities") or standard_densities()
    checks, terms, meta = [], {}, {}
    for dens in densities:
        direct = pair_measure_direct(body, dens, tol=pair_tol)
        fourier = pair_measure_fourier(body, dens)
        metric = "rel" if fourier != 0.0 else "scaled"
        checks.append(Check(dens.id, "identity", direct.value, fourier, 1e-8, metric=metric,
                            scale=pair_scale(body, dens)))
        terms[f"{dens.id}:direct"] = direct.value
        terms[f"{dens.id}:fourier"] = fourier
        meta[f"{dens.id}:direct_n"] = direct.n
    L = perimeter(body)
    const = next((c for c in checks if c.name == "const"), None)
    if const is not None:
        checks.insert(0, Check("const_equals_L2", "identity", const.lhs, L * L, 1e-12))
    return checks, terms, meta


def corollary_densities() -> List[AngularDensity]:
    """Even pi-periodic catalogue entries."""
    return [const_density(), abs_sin_4_density(), abs_cos_density(), power_sine_density(3),
            power_sine_density(4), hurwitz_density(2), cos_density(2)]


def _corollary(body, params, ext_tol, pair_tol):
    _, F = _base(body)
    densities = params.get("densities") or corollary_densities()
    checks, terms, meta = [], {}, {}
    for dens in densities:
        if dens.periodicity_class != PI_PERIODIC or not dens.even:
            raise BadParam(f"{dens.id} is not an even pi-periodic density")
        H = build_H(dens)
        res = _ext(body, H.id, H.func, ext_tol)
        meta[dens.id] = res.meta()
        H_pi = float(np.asarray(H(np.array([PI])))[0])
        rhs = 2 * H_pi * F + 2 * res.value
        lhs = pair_measure_fourier(body, dens)
        scale = abs(2 * H_pi * F) + abs(2 * res.value)
        metric = "rel" if lhs != 0.0 else "scaled"
        checks.append(Check(dens.id, "identity", lhs, rhs, 1e-4, metric=metric, scale=scale))
        terms[f"{dens.id}:2H(pi)F"] = 2 * H_pi * F
        terms[f"{dens.id}:exterior_H"] = res.value
    return checks, terms, meta


def _antipi(body, params, ext_tol, pair_tol):
    k = _check_k(params.get("k", 3), 1)
    if k % 2 == 0:
        raise BadParam("antipi needs odd k")
    _, F = _base(body)
    dens = cos_density(k)
    lhs = pair_measure_fourier(body, dens)
    direct = pair_measure_direct(body, dens, tol=pair_tol)

    def Hk(x):
        return float(np.asarray(h_k(k, np.array([x])))[0])

    def g(a, b):
        return 2.0 * h_k(k, a) + 2.0 * h_k(k, b) - h_k(k, a + b)

    meta: dict = {"direct_n": direct.n}
    I = _ext_meta(meta, "exterior", _ext(body, f"antipi_{k}", g, ext_tol, True))
    const = 2 * (4 * Hk(PI / 2) - Hk(PI)) * F
    printed_const = 2 * (2 * Hk(PI / 2) - Hk(PI)) * F
    rhs = const + 2 * I
    scale = abs(const) + abs(2 * I)
    metric = "rel" if lhs != 0.0 else "scaled"
    numH = build_H(dens, numeric=True)
    num_half, num_pi = (float(v) for v in numH(np.array([PI / 2, PI])))
    checks = [Check("antipi", "identity", lhs, rhs, 1e-4, metric=metric, scale=scale),
              Check("pair_direct_vs_pi2csq", "identity", direct.value, lhs, 1e-8,
                    metric=metric, scale=pair_scale(body, dens)),
              Check("2H(pi/2)-H(pi)_closed_vs_numeric", "structural",
                    2 * Hk(PI / 2) - Hk(PI), 2 * num_half - num_pi, 1e-9, metric="abs"),
              Check("4H(pi/2)-H(pi)_equals_-pi/(k2-1)", "structural",
                    4 * Hk(PI / 2) - Hk(PI), -PI / (k * k - 1), 1e-12, metric="abs"),
              Check("with_2H(pi/2)_constant", "diagnostic", lhs, printed_const + 2 * I, 0.0,
                    metric=metric, scale=scale)]
    terms = {"pi2_csq_k": lhs, "constant_term": const, "exterior": I,
             "constant_with_2H(pi/2)": printed_const}
    return checks, terms, meta


def _lambda(dens: AngularDensity) -> float:
    """(1/pi) int_0^pi f by Gauss-Legendre split at the kinks."""
    cuts = [t % PI for t in dens.kinks if 0.0 < t % PI < PI]
    return gl_integrate(dens.func, 0.0, PI, panels=8, order=24, breakpoints=cuts) / PI


def _const_width(body, params, ext_tol, pair_tol):
    if any(body.c_sq[k] != 0.0 for k in range(2, body.kmax + 1, 2)):
        raise BadParam("const_width_lambda needs a body with odd harmonics only")
    L = perimeter(body)
    densities = params.get("densities") or [d for d in corollary_densities()]
    checks, terms, meta = [], {}, {}
    for dens in densities:
        lam = _lambda(dens)
        direct = pair_measure_direct(body, dens, tol=pair_tol)
        # an exactly zero mean makes the relative error meaningless
        metric = "rel" if dens.A(0)[0] != 0.0 else "scaled"
        checks.append(Check(dens.id, "identity", direct.value, lam * L * L, 1e-8,
                            metric=metric, scale=pair_scale(body, dens)))
        terms[f"{dens.id}:lambda"] = lam
        meta[f"{dens.id}:direct_n"] = direct.n
    return checks, terms, meta


IDENTITIES: Dict[str, Callable] = {
    "crofton": _crofton,
    "cauchy_crofton": _cauchy_crofton,
    "hurwitz_even": _hurwitz_even,
    "hurwitz_odd_consistency": _hurwitz_odd,
    "masotti": _masotti,
    "power_sine": _power_sine,
    "abs_cos_example": _abs_cos,
    "theorem2_equivalence": _theorem2,
    "corollary_25gg": _corollary,
    "antipi": _antipi,
    "const_width_lambda": _const_width,
}


def verify(identity_id: str, body: SupportBody, params: Optional[dict] = None,
           ext_tol: float = EXT_TOL, pair_tol: float = PAIR_TOL) -> IdentityReport:
    """Compute both sides of an identity on ``body``; never asserts."""
    try:
        fn = IDENTITIES[identity_id]
    except KeyError:
        raise UnknownIdentity(f"unknown identity {identity_id!r}; known: {', '.join(IDENTITIES)}") from None
    params = dict(params or {})
    t0 = time.perf_counter()
    checks, terms, meta = fn(body, params, ext_tol, pair_tol)
    meta = dict(meta, ext_tol=ext_tol, pair_tol=pair_tol)
    shown = {k: v for k, v in params.items() if k != "densities"}
    if "densities" in params:
        shown["densities"] = [d.id for d in params["densities"]]
    report = _report(identity_id, body, shown, checks, terms, meta)
    report.wall_time = time.perf_counter() - t0
    return report
