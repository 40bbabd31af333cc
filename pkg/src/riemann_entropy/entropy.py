"""Entropy of a speed vector, its derivatives, and related functionals.

For a problem with breakpoints ``u``, velocities ``v`` and diffusions ``a`` the
entropy of ``xi = (xi_1, ..., xi_d)`` is

    E(xi) = - sum_{a_k > 0} a_k**2 du_k ln(F(z_k^+) - F(z_k^-))
            + 1/2 sum_{a_k = 0} du_k (xi_{k+1} - v_k)**2

with ``z_k^+ = (xi_{k+1} - v_k)/a_k``, ``z_k^- = (xi_k - v_k)/a_k`` and the
padding ``xi_0 = -inf``, ``xi_{d+1} = +inf``. Interval ``k`` touches only
``xi_k`` and ``xi_{k+1}``, so the Hessian is tridiagonal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import cholesky_banded, solveh_banded

from .errors import (
    DegenerateGap,
    DimensionMismatch,
    InfeasiblePoint,
    NegativeLevel,
    NonMonotoneSamples,
)
from .model import PiecewiseProblem
from .stats import LOG_SQRT_2PI, F_inverse, gap_ratio, log_F_gap


def padded(problem: PiecewiseProblem, xi) -> np.ndarray:
    """Return ``(xi_0, ..., xi_{d+1})`` with infinite ends.

    Index ``j`` of the result is the speed ``xi_j``.
    """
    xi = np.asarray(xi, dtype=float).reshape(-1)
    if xi.shape[0] != problem.d:
        raise DimensionMismatch(f"expected {problem.d} speeds, got {xi.shape[0]}")
    return np.concatenate([[-math.inf], xi, [math.inf]])


def check_feasible(problem: PiecewiseProblem, xi) -> np.ndarray:
    """Validate membership of ``xi`` in the ordered cone (closure allowed)."""
    full = padded(problem, xi)
    inner = full[1:-1]
    if not np.all(np.isfinite(inner)):
        raise InfeasiblePoint("speeds must be finite")
    if np.any(np.diff(inner) < 0):
        raise InfeasiblePoint("speeds must be nondecreasing")
    return full


def _zs(problem: PiecewiseProblem, full: np.ndarray, k: int):
    a = problem.a[k]
    return (full[k + 1] - problem.v[k]) / a, (full[k] - problem.v[k]) / a


def _value(problem: PiecewiseProblem, full: np.ndarray) -> float:
    total = 0.0
    du = problem.du
    for k in range(problem.n):
        if problem.a[k] > 0:
            hi, lo = _zs(problem, full, k)
            if not hi > lo:
                return math.inf
            total -= problem.a[k] ** 2 * du[k] * log_F_gap(hi, lo)
        else:
            total += 0.5 * du[k] * (full[k + 1] - problem.v[k]) ** 2
    return total


def E(problem: PiecewiseProblem, xi) -> float:
    """Entropy of the speed vector ``xi``; ``+inf`` when a diffusive gap is closed."""
    return _value(problem, check_feasible(problem, xi))


def E1(problem: PiecewiseProblem, xi) -> float:
    """Entropy shifted by ``sum_{a_k > 0} a_k**2 du_k ln(du_k / a_k)``.

    The shift does not depend on ``xi``; this variant has a finite limit under
    refinement of the breakpoints.
    """
    return E(problem, xi) + e1_shift(problem)


def e1_shift(problem: PiecewiseProblem) -> float:
    du = problem.du
    pos = problem.a > 0
    a = problem.a[pos]
    return float(np.sum(a * a * du[pos] * np.log(du[pos] / a)))


def interval_ratios(problem: PiecewiseProblem, full: np.ndarray, k: int):
    """For a diffusive interval ``k`` return ``(z_hi, z_lo, F'(z_hi)/G, F'(z_lo)/G)``.

    ``G`` is the F-gap of the interval. Raises :class:`DegenerateGap` if it
    vanishes.
    """
    hi, lo = _zs(problem, full, k)
    if not hi > lo:
        raise DegenerateGap(f"interval {k}: closed gap with a_k > 0")
    lg = log_F_gap(hi, lo)
    return hi, lo, gap_ratio(hi, lg), gap_ratio(lo, lg)


def _gradient(problem: PiecewiseProblem, full: np.ndarray) -> np.ndarray:
    d = problem.d
    du = problem.du
    grad = np.zeros(d + 2)
    for k in range(problem.n):
        a = problem.a[k]
        if a > 0:
            _, _, r_hi, r_lo = interval_ratios(problem, full, k)
            grad[k + 1] -= a * du[k] * r_hi
            grad[k] += a * du[k] * r_lo
        else:
            grad[k + 1] += du[k] * (full[k + 1] - problem.v[k])
    return grad[1 : d + 1]


def E_gradient(problem: PiecewiseProblem, xi) -> np.ndarray:
    """Analytic gradient of :func:`E`; requires every diffusive gap open."""
    return _gradient(problem, check_feasible(problem, xi))


@dataclass(frozen=True)
class Tridiagonal:
    """Symmetric tridiagonal matrix stored as its diagonal and superdiagonal."""

    diag: np.ndarray
    off: np.ndarray

    def toarray(self) -> np.ndarray:
        m = np.diag(self.diag)
        if len(self.off):
            m += np.diag(self.off, 1) + np.diag(self.off, -1)
        return m

    def banded(self) -> np.ndarray:
        """Upper banded storage for :mod:`scipy.linalg` routines."""
        ab = np.zeros((2, len(self.diag)))
        ab[1] = self.diag
        ab[0, 1:] = self.off
        return ab

    def cholesky(self) -> np.ndarray:
        """Banded Cholesky factor; raises ``LinAlgError`` unless positive definite."""
        return cholesky_banded(self.banded())

    def solve(self, rhs) -> np.ndarray:
        return solveh_banded(self.banded(), rhs)


def p_hessian(x: float, y: float) -> np.ndarray:
    """Hessian of ``P(x, y) = -ln(F(x) - F(y))`` on ``x > y``.

    Either argument may be infinite; the corresponding row and column then
    vanish.
    """
    lg = log_F_gap(x, y)
    rx = gap_ratio(x, lg)
    ry = gap_ratio(y, lg)
    pxx = rx * rx + (x * rx if rx else 0.0)
    pyy = ry * ry - (y * ry if ry else 0.0)
    pxy = -rx * ry
    return np.array([[pxx, pxy], [pxy, pyy]])


def _hessian(problem: PiecewiseProblem, full: np.ndarray) -> Tridiagonal:
    d = problem.d
    du = problem.du
    diag = np.zeros(d + 2)
    off = np.zeros(d + 1)  # off[j] couples xi_j and xi_{j+1}
    for k in range(problem.n):
        if problem.a[k] > 0:
            hi, lo = _zs(problem, full, k)
            if not hi > lo:
                raise DegenerateGap(f"interval {k}: closed gap with a_k > 0")
            h = p_hessian(hi, lo)
            # second derivatives in xi pick up 1/a_k**2, cancelling a_k**2
            diag[k + 1] += du[k] * h[0, 0]
            diag[k] += du[k] * h[1, 1]
            off[k] += du[k] * h[0, 1]
        else:
            diag[k + 1] += du[k]
    return Tridiagonal(diag[1 : d + 1].copy(), off[1:d].copy())


def E_hessian(problem: PiecewiseProblem, xi) -> Tridiagonal:
    return _hessian(problem, check_feasible(problem, xi))


@dataclass(frozen=True)
class CoercivityBox:
    """Explicit compact set containing a sublevel set ``{E <= level}``."""

    level: float
    delta: float
    r1: float
    r2: float
    min_gaps: np.ndarray

    def contains(self, xi) -> bool:
        xi = np.asarray(xi, dtype=float)
        if xi.size == 0:
            return True
        return bool(
            xi[0] >= self.r1
            and xi[-1] <= self.r2
            and np.all(np.diff(xi) >= self.min_gaps)
        )


def coercivity_box(problem: PiecewiseProblem, level: float) -> CoercivityBox:
    """Bounds valid for every feasible ``xi`` with ``E(xi) <= level``.

    With ``m = min_{a_k > 0} a_k**2 du_k`` every diffusive F-gap is at least
    ``delta = exp(-level/m)``, which pins ``xi_1`` from below, ``xi_d`` from
    above and each diffusive gap ``xi_{k+1} - xi_k`` from below by ``a_k delta``.
    ``delta`` is reported as 1 when no interval diffuses (it then plays no
    role).
    """
    if level < 0 or math.isnan(level):
        raise NegativeLevel(f"level must be nonnegative, got {level!r}")
    if problem.d < 1:
        raise DimensionMismatch("coercivity box needs at least one free speed")
    v, a, du = problem.v, problem.a, problem.du
    pos = a > 0
    if np.any(pos):
        m = float(np.min(a[pos] ** 2 * du[pos]))
        delta = math.exp(-level / m)
    else:
        delta = 1.0
    # F^{-1}(delta) <= 0; it is +inf only at level 0, where the quadratic bound wins
    quantile = F_inverse(delta) if delta < 1.0 else math.inf

    def scaled(ak: float) -> float:
        return ak * quantile if ak > 0 else 0.0

    r1 = v[0] + min(scaled(a[0]), -math.sqrt(2.0 * level / du[0]))
    r2 = v[-1] + max(-scaled(a[-1]), math.sqrt(2.0 * level / du[-1]))
    gaps = a[1 : problem.d] * delta
    return CoercivityBox(float(level), float(delta), float(r1), float(r2), np.array(gaps, dtype=float))


def continuum_J(
    v_fn: Callable,
    a_fn: Callable,
    u_samples,
    xi_samples,
    normalized: bool = True,
) -> float:
    """Trapezoid approximation of the continuum entropy functional.

    Evaluates ``int [(xi - v)**2/2 - a**2 ln xi'] du`` on a sample table of an
    increasing function ``xi(u)``, with ``xi'`` from second-order centred
    differences on the (possibly non-uniform) grid. When ``normalized`` is set
    the density normalisation ``a**2 ln(2 pi)/2`` is added to the integrand;
    that is the form approached by :func:`E1` under refinement.

    Raises
    ------
    NonMonotoneSamples
        If ``u`` is not strictly increasing, ``xi`` decreases anywhere, or
        ``xi'`` vanishes where ``a > 0``.
    """
    u = np.asarray(u_samples, dtype=float)
    xi = np.asarray(xi_samples, dtype=float)
    if u.shape != xi.shape or u.ndim != 1 or u.size < 3:
        raise NonMonotoneSamples("need matching 1-d sample tables with at least 3 points")
    if np.any(np.diff(u) <= 0):
        raise NonMonotoneSamples("u samples must strictly increase")
    if np.any(np.diff(xi) < 0):
        raise NonMonotoneSamples("xi samples must be nondecreasing")
    v = np.asarray(v_fn(u), dtype=float) * np.ones_like(u)
    a = np.asarray(a_fn(u), dtype=float) * np.ones_like(u)
    dxi = np.gradient(xi, u, edge_order=2)
    diffusive = a > 0
    if np.any(dxi[diffusive] <= 0):
        raise NonMonotoneSamples("xi must strictly increase where a > 0")
    integrand = 0.5 * (xi - v) ** 2
    log_term = np.zeros_like(u)
    log_term[diffusive] = np.log(dxi[diffusive])
    if normalized:
        log_term[diffusive] -= LOG_SQRT_2PI
    integrand -= a * a * log_term
    return float(np.trapezoid(integrand, u))


__all__ = [
    "E",
    "E1",
    "e1_shift",
    "E_gradient",
    "E_hessian",
    "Tridiagonal",
    "p_hessian",
    "CoercivityBox",
    "coercivity_box",
    "continuum_J",
    "check_feasible",
    "padded",
    "interval_ratios",
]
