"""Gamma-function coefficients for powers of the sine.

Reciprocal Gamma comes from :func:`scipy.special.rgamma`, which returns an
exact 0.0 at the poles (nonpositive integers). That zero is what truncates
the power-sine coefficient series for odd ``m``.
"""

from __future__ import annotations

import math

from scipy.special import rgamma as _rgamma

from .errors import BadParam


def rgamma(x: float) -> float:
    """1/Gamma(x), exactly 0 at nonpositive integers."""
    if x <= 0 and float(x).is_integer():
        return 0.0
    return float(_rgamma(x))


def sine_power_integral(m: int, k: int) -> float:
    """I_{m,k} = int_0^pi sin^m(x) cos(kx) dx for integer m >= 0, k >= 0.

    Closed form pi cos(k pi/2) m! / (2^m Gamma(1+(m+k)/2) Gamma(1+(m-k)/2)).
    """
    if m < 0 or k < 0:
        raise BadParam("need m >= 0 and k >= 0")
    if k % 2:
        return 0.0
    sign = -1.0 if (k // 2) % 2 else 1.0
    val = (sign * math.pi * math.factorial(m) / 2.0**m
           * rgamma(1 + 0.5 * (m + k)) * rgamma(1 + 0.5 * (m - k)))
    return val + 0.0  # no signed zeros at poles


def power_sine_A(m: int, k: int) -> float:
    """Cosine coefficient A_k of m(m-1)|sin x|^(m-3) - m^2 |sin x|^(m-1).

    A_k = m!/(2^(m-2)(m-2)) (-1)^(k/2+1) (k^2-1)
          / (Gamma((m+1+k)/2) Gamma((m+1-k)/2))   for even k, 0 for odd k.

    At k = 0 this is twice the mean of the density (the a_0 of the
    a_0/2 + sum convention).
    """
    if int(m) != m or m < 3:
        raise BadParam(f"power-sine density needs integer m >= 3, got {m}")
    if int(k) != k or k < 0:
        raise BadParam(f"need integer k >= 0, got {k}")
    m, k = int(m), int(k)
    if k % 2:
        return 0.0
    sign = 1.0 if (k // 2 + 1) % 2 == 0 else -1.0
    lead = math.factorial(m) / (2.0 ** (m - 2) * (m - 2))
    val = lead * sign * (k * k - 1) * rgamma(0.5 * (m + 1 + k)) * rgamma(0.5 * (m + 1 - k))
    return val + 0.0
