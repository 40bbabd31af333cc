"""Minimisation of the entropy over the ordered cone.

Adjacent speeds ``xi_k <= xi_{k+1}`` may coincide only when ``a_k = 0``; across a
diffusive interval the entropy itself is an infinite barrier. The minimiser is
located in two phases:

1. diagonally scaled projected gradient, projecting with weighted PAVA, to
   settle which speeds coincide;
2. active-set Newton on the merged-group variables (tridiagonal solves),
   merging groups when a step would cross an ``a_k = 0`` constraint and
   splitting a group when a suffix sum of its gradient is negative.

Optimality is certified by the grouped conditions: on every maximal group
``xi_k = ... = xi_l`` the gradient sums to zero and each of its suffix sums
``sum_{i=j}^{l} dE/dxi_i`` (``k < j <= l``) is nonnegative.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgError

from .entropy import Tridiagonal, _gradient, _hessian, _value, check_feasible, padded
from .errors import InfeasiblePoint, MaxIterationsExceeded, NonPositiveWeight
from .model import PiecewiseProblem, is_hyperbolic

log = logging.getLogger(__name__)

ARMIJO = 1e-4
SNAP_RTOL = 1e-9
STEP_RTOL = 1e-12
MAX_POLISH = 20
EXPAND_RATIO = 0.2
EXPAND_BISECT = 30


def pava(weights, targets) -> np.ndarray:
    """Weighted isotonic regression by pool-adjacent-violators.

    Returns the exact minimiser of ``1/2 sum w_k (x_k - t_k)**2`` subject to
    ``x_1 <= ... <= x_n``. Every pooled block takes the weighted mean of its
    targets, so coinciding entries are bitwise equal.
    """
    w = np.asarray(weights, dtype=float).reshape(-1)
    t = np.asarray(targets, dtype=float).reshape(-1)
    if w.shape != t.shape:
        raise ValueError("weights and targets must have equal length")
    if np.any(~(w > 0)):
        raise NonPositiveWeight("weights must be positive")
    # blocks as parallel stacks: weighted sum, weight, length
    sums: list[float] = []
    wts: list[float] = []
    lens: list[int] = []
    for wk, tk in zip(w, t):
        sums.append(wk * tk)
        wts.append(wk)
        lens.append(1)
        while len(sums) > 1 and sums[-2] / wts[-2] > sums[-1] / wts[-1]:
            s, ww, ln = sums.pop(), wts.pop(), lens.pop()
            sums[-1] += s
            wts[-1] += ww
            lens[-1] += ln
    return np.repeat([s / ww for s, ww in zip(sums, wts)], lens)


@dataclass(frozen=True)
class Group:
    """Maximal run ``xi_k = ... = xi_l = c`` (1-based speed indices)."""

    k: int
    l: int
    c: float


def group_structure(xi) -> list[Group]:
    """Split ``xi`` into maximal runs of exactly equal coordinates."""
    xi = np.asarray(xi, dtype=float)
    groups = []
    start = 0
    for i in range(1, len(xi) + 1):
        if i == len(xi) or xi[i] != xi[start]:
            groups.append(Group(start + 1, i, float(xi[start])))
            start = i
    return groups


@dataclass
class KKTReport:
    """Grouped optimality residuals at a feasible point."""

    groups: list[Group]
    group_sums: list[float]
    suffix_sums: list[list[float]]
    max_violation: float
    tol: float

    @property
    def optimal(self) -> bool:
        return self.max_violation <= self.tol

    def to_dict(self) -> dict:
        return {
            "groups": [{"k": g.k, "l": g.l, "c": g.c} for g in self.groups],
            "group_sums": list(self.group_sums),
            "suffix_sums": [list(s) for s in self.suffix_sums],
            "max_violation": self.max_violation,
            "tol": self.tol,
            "optimal": self.optimal,
        }


def _check_merges(problem: PiecewiseProblem, groups: list[Group]) -> None:
    for g in groups:
        for i in range(g.k, g.l):
            if problem.a[i] > 0:
                raise InfeasiblePoint(
                    f"xi_{i} = xi_{i + 1} across interval {i} with a > 0"
                )


def kkt_check(problem: PiecewiseProblem, xi, tol: float = 1e-10) -> KKTReport:
    """Evaluate the grouped optimality conditions at ``xi``.

    Groups are detected by exact equality. Raises :class:`InfeasiblePoint`
    for decreasing coordinates or coinciding speeds across a diffusive
    interval.
    """
    full = check_feasible(problem, xi)
    inner = full[1:-1]
    groups = group_structure(inner)
    _check_merges(problem, groups)
    grad = _gradient(problem, full)
    group_sums, suffix_sums = [], []
    worst = 0.0
    for g in groups:
        part = grad[g.k - 1 : g.l]
        suffixes = np.cumsum(part[::-1])[::-1]
        total = float(suffixes[0])
        tails = [float(s) for s in suffixes[1:]]
        group_sums.append(total)
        suffix_sums.append(tails)
        worst = max(worst, abs(total), *(-s for s in tails))
    return KKTReport(groups, group_sums, suffix_sums, float(worst), float(tol))


def initial_point(problem: PiecewiseProblem, spread: float = 0.1) -> np.ndarray:
    """Feasible, strictly interior starting point.

    Speed ``xi_{k+1}`` targets ``v_k``; the targets are made monotone by PAVA
    with weights ``du_k`` and every diffusive gap is then widened to at least
    ``spread * a_k``, re-centring so the mean displacement is zero.
    """
    d = problem.d
    if d == 0:
        return np.zeros(0)
    xi = pava(problem.du[:d], problem.v[:d])
    need = np.zeros(d)
    need[1:] = spread * problem.a[1:d]
    out = xi.copy()
    for j in range(1, d):
        out[j] = max(out[j], out[j - 1] + need[j])
    out -= np.mean(out - xi)
    for j in range(1, d):
        # re-centring is a uniform shift; guard the gaps against rounding
        if need[j] > 0 and not out[j] > out[j - 1]:
            out[j] = np.nextafter(out[j - 1], math.inf)
    return out


@dataclass
class MinimizeResult:
    xi: np.ndarray
    report: KKTReport
    iterations: int
    value: float
    history: list[float] = field(default_factory=list, repr=False)


def _mergeable(problem: PiecewiseProblem, j: int) -> bool:
    """Whether speeds ``xi_j`` and ``xi_{j+1}`` (1-based) may coincide."""
    return problem.a[j] == 0


def _blocks_from_ties(problem: PiecewiseProblem, xi: np.ndarray) -> list[list[int]]:
    """0-based index blocks of tied coordinates (ties only across a = 0)."""
    blocks = [[0]]
    for i in range(1, len(xi)):
        if xi[i] == xi[i - 1] and _mergeable(problem, i):
            blocks[-1].append(i)
        else:
            blocks.append([i])
    return blocks


def _reduce(hess: Tridiagonal, grad: np.ndarray, blocks):
    m = len(blocks)
    diag = np.zeros(m)
    off = np.zeros(max(m - 1, 0))
    g = np.zeros(m)
    for j, b in enumerate(blocks):
        lo, hi = b[0], b[-1]
        diag[j] = hess.diag[lo : hi + 1].sum() + 2.0 * hess.off[lo:hi].sum()
        g[j] = grad[lo : hi + 1].sum()
        if j + 1 < m:
            off[j] = hess.off[hi]
    return Tridiagonal(diag, off), g


class _Solver:
    def __init__(self, problem: PiecewiseProblem, tol: float, max_iter: int):
        self.problem = problem
        self.tol = tol
        self.max_iter = max_iter
        self.iterations = 0
        self.history: list[float] = []

    def value(self, xi: np.ndarray) -> float:
        return _value(self.problem, padded(self.problem, xi))

    def grad(self, xi: np.ndarray) -> np.ndarray:
        return _gradient(self.problem, padded(self.problem, xi))

    def hess(self, xi: np.ndarray) -> Tridiagonal:
        return _hessian(self.problem, padded(self.problem, xi))

    def tick(self, xi: np.ndarray, f: float) -> None:
        self.iterations += 1
        self.history.append(f)
        if self.iterations > self.max_iter:
            report = kkt_check(self.problem, xi, self.tol)
            raise MaxIterationsExceeded(
                f"no convergence within {self.max_iter} iterations "
                f"(KKT violation {report.max_violation:.3e})",
                best=xi.copy(),
                report=report,
                iterations=self.iterations,
            )

    def projected_gradient(self, xi: np.ndarray, f: float, steps: int):
        for _ in range(steps):
            g = self.grad(xi)
            scale = np.maximum(self.hess(xi).diag, 1e-12)
            s = 1.0
            while True:
                trial = pava(scale, xi - s * g / scale)
                ft = self.value(trial)
                if ft <= f + ARMIJO * float(g @ (trial - xi)):
                    break
                s *= 0.5
                if s < 1e-12:
                    return xi, f
            moved = np.max(np.abs(trial - xi))
            xi, f = trial, ft
            self.tick(xi, f)
            if moved <= 1e-10 * (1.0 + np.max(np.abs(xi))):
                break
        return xi, f

    def newton_face(self, xi: np.ndarray, f: float, blocks):
        """Minimise on the face defined by ``blocks``, merging on contact."""
        problem = self.problem
        polish = 0
        while True:
            g = self.grad(xi)
            hess, gr = _reduce(self.hess(xi), g, blocks)
            gnorm = float(np.max(np.abs(gr)))
            try:
                p_red = hess.solve(-gr)
            except (LinAlgError, ValueError):
                p_red = -gr / np.maximum(hess.diag, 1e-12)
            if gnorm <= 0.1 * self.tol:
                # keep refining positions along flat directions, but not forever
                polish += 1
                if polish > MAX_POLISH or np.max(np.abs(p_red)) <= STEP_RTOL * (
                    1.0 + np.max(np.abs(xi))
                ):
                    return xi, f, blocks
            if gnorm == 0.0:
                return xi, f, blocks
            slope = float(gr @ p_red)
            if not slope < 0:
                p_red = -gr
                slope = float(gr @ p_red)
            # largest step before two groups separated by a = 0 touch
            t_max, hit = math.inf, []
            for j in range(len(blocks) - 1):
                last = blocks[j][-1]
                closing = p_red[j] - p_red[j + 1]
                if _mergeable(problem, last + 1) and closing > 0:
                    t = (xi[blocks[j + 1][0]] - xi[last]) / closing
                    if t < t_max:
                        t_max, hit = t, [j]
                    elif t == t_max:
                        hit.append(j)
            p = np.concatenate([np.full(len(b), p_red[j]) for j, b in enumerate(blocks)])
            t = min(1.0, t_max)
            while True:
                trial = xi + t * p
                ft = self.value(trial)
                if ft <= f + ARMIJO * t * slope or self._descent_certified(trial, ft, p):
                    break
                t *= 0.5
                if t < 1e-14:
                    return xi, f, blocks
            if t == 1.0 < t_max:
                t = self._expand(xi, p, slope, t_max)
                trial = xi + t * p
                ft = self.value(trial)
            if t == t_max:
                blocks = self._merge(trial, blocks, hit)
                ft = self.value(trial)
            xi, f = trial, ft
            self.tick(xi, f)

    def _expand(self, xi, p, slope, t_max) -> float:
        """Lengthen a full Newton step that stopped well short of the line minimum.

        Happens where E decays like a Gaussian tail and Newton creeps with a
        nearly constant step. The line minimum is bracketed by doubling and
        located by bisection on the sign of the directional derivative.
        """
        def dphi(t):
            trial = xi + t * p
            if not math.isfinite(self.value(trial)):
                return math.inf
            return float(self.grad(trial) @ p)

        if not dphi(1.0) < EXPAND_RATIO * slope:
            return 1.0
        lo, hi = 1.0, None
        t = 2.0
        while t < t_max and t < 2.0**40:
            if dphi(t) < 0:
                lo, t = t, 2.0 * t
            else:
                hi = t
                break
        if hi is None:
            if math.isfinite(t_max) and dphi(t_max) <= 0:
                return t_max
            hi = min(t, t_max)
        for _ in range(EXPAND_BISECT):
            mid = 0.5 * (lo + hi)
            if dphi(mid) < 0:
                lo = mid
            else:
                hi = mid
        return lo

    def _descent_certified(self, trial, ft, p) -> bool:
        # E is convex along the line, so a nonpositive slope at the trial point
        # proves descent even when the change in E is below rounding
        if not math.isfinite(ft):
            return False
        return float(self.grad(trial) @ p) <= 0.0

    @staticmethod
    def _merge(xi: np.ndarray, blocks, hit):
        merged = []
        for j, b in enumerate(blocks):
            if merged and (j - 1) in hit:
                merged[-1] = merged[-1] + b
            else:
                merged.append(list(b))
        for b in merged:
            xi[b] = float(np.mean(xi[b]))
        return merged

    def split_candidate(self, xi: np.ndarray, blocks):
        g = self.grad(xi)
        worst, where = -self.tol, None
        for j, b in enumerate(blocks):
            if len(b) < 2:
                continue
            suffix = np.cumsum(g[b][::-1])[::-1]
            for r in range(1, len(b)):
                if suffix[r] < worst:
                    worst, where = suffix[r], (j, r)
        return where

    def snap(self, xi: np.ndarray, f: float, blocks):
        """Merge near-coincident groups across a = 0 and re-optimise the face."""
        near = []
        for j in range(len(blocks) - 1):
            last, first = blocks[j][-1], blocks[j + 1][0]
            if not _mergeable(self.problem, last + 1):
                continue
            if xi[first] - xi[last] <= SNAP_RTOL * (1.0 + abs(xi[last])):
                near.append(j)
        if not near:
            return None
        trial = xi.copy()
        merged_blocks = []
        for j, b in enumerate(blocks):
            if merged_blocks and (j - 1) in near:
                merged_blocks[-1] = merged_blocks[-1] + b
            else:
                merged_blocks.append(list(b))
        for b in merged_blocks:
            trial[b] = float(np.mean(trial[b]))
        ft = self.value(trial)
        if not math.isfinite(ft):
            return None
        trial, ft, merged_blocks = self.newton_face(trial, ft, merged_blocks)
        return trial, ft, merged_blocks

    def forced_ties(self, xi: np.ndarray, f: float):
        """Tie ``xi_k`` to ``xi_{k+1}`` wherever ``a_{k-1} > 0 = a_k``.

        There ``dE/dxi_k = -A(u)'(c-) < 0`` for every position, so an isolated
        ``xi_k`` is never stationary; raising it to ``xi_{k+1}`` only lowers E.
        """
        a = self.problem.a
        moved = False
        for k in range(self.problem.d - 1, 0, -1):
            if a[k - 1] > 0 and a[k] == 0 and xi[k - 1] != xi[k]:
                xi[k - 1] = xi[k]
                moved = True
        if moved:
            f = self.value(xi)
            self.tick(xi, f)
        return xi, f

    def run(self, xi: np.ndarray, pg_steps: int = 25):
        f = self.value(xi)
        self.history.append(f)
        xi, f = self.projected_gradient(xi, f, pg_steps)
        xi, f = self.forced_ties(xi.copy(), f)
        blocks = _blocks_from_ties(self.problem, xi)
        while True:
            xi, f, blocks = self.newton_face(xi, f, blocks)
            where = self.split_candidate(xi, blocks)
            if where is not None:
                j, r = where
                b = blocks[j]
                blocks = blocks[:j] + [b[:r], b[r:]] + blocks[j + 1 :]
                continue
            report = kkt_check(self.problem, xi, self.tol)
            snapped = self.snap(xi, f, blocks)
            if snapped is not None:
                s_xi, s_f, s_blocks = snapped
                s_report = kkt_check(self.problem, s_xi, self.tol)
                if s_report.optimal and s_f <= f + 1e-12 * (1.0 + abs(f)):
                    xi, f, blocks, report = s_xi, s_f, s_blocks, s_report
            if report.optimal:
                return xi, f, report
            # residual group sums above tol: polish once more on the same face
            self.tick(xi, f)


def minimize(
    problem: PiecewiseProblem,
    tol: float = 1e-10,
    max_iter: int = 500,
    initial=None,
    method: str = "auto",
) -> MinimizeResult:
    """Find the unique minimiser of the entropy over the ordered cone.

    Parameters
    ----------
    tol
        Bound on the KKT ``max_violation`` of the returned point.
    max_iter
        Cap on accepted iterations across both phases.
    initial
        Optional feasible, strictly interior start; defaults to
        :func:`initial_point`.
    method
        ``"auto"`` solves the purely hyperbolic case (all ``a_k = 0``)
        exactly with PAVA; ``"newton"`` always runs the iterative solver.

    Raises
    ------
    MaxIterationsExceeded
        Carries the last iterate in ``best``.
    """
    if method not in ("auto", "newton"):
        raise ValueError(f"unknown method {method!r}")
    d = problem.d
    if d == 0:
        xi = np.zeros(0)
        return MinimizeResult(xi, kkt_check(problem, xi, tol), 0, _value(problem, padded(problem, xi)))
    if method == "auto" and is_hyperbolic(problem):
        xi = pava(problem.du, problem.v)
        report = kkt_check(problem, xi, tol)
        return MinimizeResult(xi, report, 0, _value(problem, padded(problem, xi)))

    if initial is None:
        xi0 = initial_point(problem)
    else:
        xi0 = np.array(initial, dtype=float)
        check_feasible(problem, xi0)
    if not math.isfinite(_value(problem, padded(problem, xi0))):
        raise InfeasiblePoint("initial point lies on the boundary of a diffusive gap")

    solver = _Solver(problem, tol, max_iter)
    xi, f, report = solver.run(xi0)
    log.debug("minimize: %d iterations, E=%.17g, kkt=%.3e", solver.iterations, f, report.max_violation)
    return MinimizeResult(xi, report, solver.iterations, f, solver.history)


__all__ = [
    "pava",
    "Group",
    "group_structure",
    "KKTReport",
    "kkt_check",
    "initial_point",
    "MinimizeResult",
    "minimize",
]
