"""Explicit finite-volume solver for ``u_t + phi(u)_x - t A(u)_xx = 0``.

Riemann data (``alpha`` for ``x < 0``, ``beta`` for ``x > 0``) is advanced on a
uniform grid over ``[-L, L]`` with ghost cells held at ``alpha`` and ``beta``.
The advective flux is Engquist-Osher: ``phi = phi_plus + phi_minus`` where the
two parts integrate the positive and negative slopes of the piecewise-linear
``phi``, and ``F(ul, ur) = phi_plus(ul) + phi_minus(ur)``. The diffusive flux
is ``t (A(u_{i+1}) - A(u_i)) / h``. With

    dt (max|v| / h + 2 (t + dt) max(a)**2 / h**2) = cfl

every step is a monotone update, so the maximum principle and monotonicity in
``x`` carry over from the data. Bounding the diffusion coefficient by its
value at the end of the step keeps the first steps from ``t = 0`` short.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import GridMismatch, UnstableParameters
from .model import PiecewiseProblem, max_diffusion, max_speed
from .profile import SelfSimilarProfile, format_float

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FDSolution:
    problem: PiecewiseProblem
    x_centers: np.ndarray
    h: float
    L: float
    t_final: float
    values: np.ndarray
    initial: np.ndarray
    steps_taken: int
    boundary_inflow: float  # time integral of (left flux - right flux)

    def mass_defect(self) -> float:
        """``h sum(values - initial) - boundary_inflow``; zero up to rounding."""
        return float(self.h * np.sum(self.values - self.initial) - self.boundary_inflow)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["x", "u"])
        for x, u in zip(self.x_centers, self.values):
            writer.writerow([format_float(x), format_float(u)])
        return buf.getvalue()


def min_half_width(problem: PiecewiseProblem, t_final: float) -> float:
    """Smallest admissible ``L``: ``t max|v| + 6 max(a) sqrt(t) + 1``."""
    return t_final * max_speed(problem) + 6.0 * max_diffusion(problem) * math.sqrt(t_final) + 1.0


def split_flux_nodes(problem: PiecewiseProblem):
    """Breakpoint values of ``phi_plus``, ``phi_minus`` and ``A``."""
    du = problem.du
    plus = np.concatenate([[0.0], np.cumsum(np.maximum(problem.v, 0.0) * du)])
    minus = np.concatenate([[0.0], np.cumsum(np.minimum(problem.v, 0.0) * du)])
    return plus, minus, np.asarray(problem.fluxes.A_nodes, dtype=float)


@njit(cache=True)
def _interp3(w, nodes, f1, f2, f3, o1, o2, o3):
    m = nodes.shape[0] - 1
    for i in range(w.shape[0]):
        x = min(max(w[i], nodes[0]), nodes[m])
        j = np.searchsorted(nodes, x, side="right") - 1
        if j > m - 1:
            j = m - 1
        s = (x - nodes[j]) / (nodes[j + 1] - nodes[j])
        o1[i] = f1[j] + s * (f1[j + 1] - f1[j])
        o2[i] = f2[j] + s * (f2[j + 1] - f2[j])
        o3[i] = f3[j] + s * (f3[j + 1] - f3[j])


@njit(cache=True)
def _march(w, nodes, plus, minus, anodes, h, t_final, cfl, vmax, a2max):
    # w includes one ghost cell per side; returns (steps, inflow)
    size = w.shape[0]
    pp = np.empty(size)
    pm = np.empty(size)
    aa = np.empty(size)
    flux = np.empty(size - 1)
    t = 0.0
    steps = 0
    inflow = 0.0
    while t < t_final:
        # largest dt with dt (vmax/h + 2 (t + dt) a2max/h**2) <= cfl
        b = 2.0 * a2max / (h * h)
        c0 = vmax / h + b * t
        if c0 > 0.0 or b > 0.0:
            dt = 2.0 * cfl / (c0 + math.sqrt(c0 * c0 + 4.0 * b * cfl))
        else:
            dt = t_final - t
        if t + dt >= t_final:
            dt = t_final - t
        _interp3(w, nodes, plus, minus, anodes, pp, pm, aa)
        for i in range(size - 1):
            flux[i] = pp[i] + pm[i + 1] - t * (aa[i + 1] - aa[i]) / h
        r = dt / h
        for i in range(1, size - 1):
            w[i] -= r * (flux[i] - flux[i - 1])
        inflow += dt * (flux[0] - flux[size - 2])
        t += dt
        steps += 1
    return steps, inflow


def solve_fd(
    problem: PiecewiseProblem,
    L: float | None = None,
    h: float = 0.01,
    t_final: float = 1.0,
    cfl: float = 0.4,
) -> FDSolution:
    """March Riemann data to ``t_final``.

    The grid has ``N = 2 ceil(L/h)`` cells so that ``x = 0`` is a cell face;
    the half-width actually used is ``N h / 2 >= L``. ``L`` defaults to
    :func:`min_half_width`.

    Raises
    ------
    UnstableParameters
        If ``cfl`` is not in ``(0, 1)``, ``h`` or ``t_final`` is not positive,
        or ``L`` is below :func:`min_half_width`.
    """
    if not 0.0 < cfl < 1.0:
        raise UnstableParameters(f"cfl must lie in (0, 1), got {cfl!r}")
    if not (h > 0 and math.isfinite(h)):
        raise UnstableParameters(f"h must be positive, got {h!r}")
    if not (t_final > 0 and math.isfinite(t_final)):
        raise UnstableParameters(f"t_final must be positive, got {t_final!r}")
    need = min_half_width(problem, t_final)
    if L is None:
        L = need
    if not L >= need:
        raise UnstableParameters(f"L = {L!r} below the required half-width {need:.6g}")
    half = int(math.ceil(L / h - 1e-9))
    cells = 2 * half
    x = (np.arange(cells) - half + 0.5) * h
    initial = np.where(x < 0, problem.alpha, problem.beta).astype(float)
    w = np.concatenate([[problem.alpha], initial, [problem.beta]])
    plus, minus, anodes = split_flux_nodes(problem)
    steps, inflow = _march(
        w,
        np.asarray(problem.u, dtype=float),
        plus,
        minus,
        anodes,
        float(h),
        float(t_final),
        float(cfl),
        max_speed(problem),
        max_diffusion(problem) ** 2,
    )
    log.debug("solve_fd: %d cells, %d steps", cells, steps)
    return FDSolution(
        problem, x, float(h), half * float(h), float(t_final), w[1:-1].copy(), initial, int(steps), float(inflow)
    )


@dataclass(frozen=True)
class Comparison:
    l1_error: float
    linf_error_away_from_jumps: float

    def to_dict(self) -> dict:
        return {"l1_error": self.l1_error, "linf_error_away_from_jumps": self.linf_error_away_from_jumps}


def compare(fd: FDSolution, profile: SelfSimilarProfile) -> Comparison:
    """Distance between the grid solution and ``u(x / t_final)``.

    The sup-norm skips cells within ``10 h`` of ``c t_final`` for every
    discontinuity speed ``c``.

    Raises
    ------
    GridMismatch
        If the profile belongs to a different problem or the grid is malformed.
    """
    if fd.problem != profile.problem:
        raise GridMismatch("FD solution and profile are for different problems")
    if fd.values.shape != fd.x_centers.shape or not fd.t_final > 0:
        raise GridMismatch("malformed FD solution")
    exact = profile.eval(fd.x_centers / fd.t_final)
    err = np.abs(fd.values - exact)
    l1 = fd.h * float(np.sum(err))
    mask = np.ones(err.shape, dtype=bool)
    for jump in profile.discontinuities():
        mask &= np.abs(fd.x_centers - jump.c * fd.t_final) > 10.0 * fd.h
    linf = float(np.max(err[mask])) if np.any(mask) else 0.0
    return Comparison(l1, linf)


__all__ = [
    "FDSolution",
    "Comparison",
    "solve_fd",
    "compare",
    "min_half_width",
    "split_flux_nodes",
]
