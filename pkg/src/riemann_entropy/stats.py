"""Standard normal CDF ``F`` and the log-gap ``ln(F(x) - F(y))``.

All functions are scalar and accept ``+-inf`` where it makes sense, so the
boundary conventions ``F(-inf) = 0`` and ``F(+inf) = 1`` need no special
casing downstream.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import log_ndtr, ndtr, ndtri

from .errors import EmptyGap, ProbabilityOutOfRange

LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(32)


def F(z: float) -> float:
    """Standard normal cumulative distribution function."""
    return float(ndtr(z))


def F_prime(z: float) -> float:
    """Standard normal density ``exp(-z**2 / 2) / sqrt(2 pi)``."""
    return INV_SQRT_2PI * math.exp(-0.5 * z * z)


def log_F_prime(z: float) -> float:
    if math.isinf(z):
        return -math.inf
    return -0.5 * z * z - LOG_SQRT_2PI


def log_F(z: float) -> float:
    return float(log_ndtr(z))


def F_inverse(p: float) -> float:
    """Quantile function of the standard normal law.

    Raises
    ------
    ProbabilityOutOfRange
        Unless ``0 < p < 1``.
    """
    if not 0.0 < p < 1.0:
        raise ProbabilityOutOfRange(f"probability must lie in (0, 1), got {p!r}")
    return float(ndtri(p))


def _log1mexp(x: float) -> float:
    """``ln(1 - exp(x))`` for ``x < 0``."""
    if x > -math.log(2.0):
        return math.log(-math.expm1(x))
    return math.log1p(-math.exp(x))


def _log_gap_quadrature(mid: float, width: float) -> float:
    # ln of the density integral over mid -+ width/2, density at mid factored out;
    # logs are taken separately so subnormal widths do not underflow
    s = 0.5 * width * _GL_NODES
    vals = np.exp(-mid * s - 0.5 * s * s)
    return log_F_prime(mid) + math.log(width) - math.log(2.0) + math.log(float(np.dot(_GL_WEIGHTS, vals)))


def log_F_gap(x: float, y: float) -> float:
    """Return ``ln(F(x) - F(y))`` for ``x > y``.

    The difference is never formed by subtracting two CDF values in a tail.
    Short intervals are integrated directly by Gauss-Legendre quadrature of
    the density; otherwise the interval is reflected into the left tail and
    ``ln F(x) + ln(1 - F(y)/F(x))`` is evaluated from log-CDF values.

    Raises
    ------
    EmptyGap
        If ``x <= y``.
    """
    x = float(x)
    y = float(y)
    if not x > y:
        raise EmptyGap(f"empty interval: x={x!r} <= y={y!r}")
    if y == -math.inf:
        return float(log_ndtr(x))
    if x == math.inf:
        return float(log_ndtr(-y))
    width = x - y
    mid = 0.5 * (x + y)
    if width <= 2.0 and abs(mid) * width <= 8.0:
        return _log_gap_quadrature(mid, width)
    if mid > 0.0:
        x, y = -y, -x
    lx = float(log_ndtr(x))
    ly = float(log_ndtr(y))
    return lx + _log1mexp(ly - lx)


def gap_ratio(z: float, lgap: float) -> float:
    """``F'(z) / G`` where ``lgap = ln G``; zero for infinite ``z``."""
    if math.isinf(z):
        return 0.0
    return math.exp(log_F_prime(z) - lgap)


__all__ = [
    "F",
    "F_prime",
    "log_F_prime",
    "log_F",
    "F_inverse",
    "log_F_gap",
    "gap_ratio",
    "INV_SQRT_2PI",
    "LOG_SQRT_2PI",
]
