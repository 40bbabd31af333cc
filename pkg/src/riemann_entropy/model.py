"""Riemann problem data with piecewise-constant velocity and diffusion.

A problem is given by state breakpoints ``u_0 < u_1 < ... < u_n``, a velocity
``v_k`` and a diffusion ``a_k >= 0`` on every open interval ``(u_k, u_{k+1})``.
The induced fluxes are the continuous piecewise-linear functions

    phi'(u) = v_k,   A'(u) = a_k**2   on (u_k, u_{k+1}),

anchored at ``phi(u_0) = A(u_0) = 0``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    LengthMismatch,
    NegativeDiffusion,
    NonIncreasingBreakpoints,
    OutOfRange,
    ProblemError,
)


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class FluxFunctions:
    """Piecewise-linear flux ``phi`` and diffusion potential ``A``.

    Both are stored by their values at the breakpoints and evaluated by linear
    interpolation, so they are exactly affine between consecutive breakpoints.
    """

    breakpoints: np.ndarray
    phi_nodes: np.ndarray
    A_nodes: np.ndarray

    def _check(self, u):
        arr = np.asarray(u, dtype=float)
        lo, hi = self.breakpoints[0], self.breakpoints[-1]
        if np.any(~((arr >= lo) & (arr <= hi))):
            raise OutOfRange(f"state outside [{lo!r}, {hi!r}]")
        return arr

    def phi(self, u):
        arr = self._check(u)
        out = np.interp(arr, self.breakpoints, self.phi_nodes)
        return float(out) if out.ndim == 0 else out

    def A(self, u):
        arr = self._check(u)
        out = np.interp(arr, self.breakpoints, self.A_nodes)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class PiecewiseProblem:
    """Validated Riemann problem. Build it with :func:`validate`."""

    u: np.ndarray
    v: np.ndarray
    a: np.ndarray
    fluxes: FluxFunctions = field(repr=False, compare=False)

    @property
    def n(self) -> int:
        return len(self.v)

    @property
    def d(self) -> int:
        """Number of free discontinuity speeds."""
        return self.n - 1 if self.a[-1] > 0 else self.n

    @property
    def du(self) -> np.ndarray:
        return np.diff(self.u)

    @property
    def alpha(self) -> float:
        return float(self.u[0])

    @property
    def beta(self) -> float:
        return float(self.u[-1])

    def diffusion(self, k: int) -> float:
        """``a_k`` with the convention ``a_k = 0`` for ``k >= n`` or ``k < 0``."""
        if 0 <= k < self.n:
            return float(self.a[k])
        return 0.0

    def phi(self, u):
        return self.fluxes.phi(u)

    def A(self, u):
        return self.fluxes.A(u)

    def to_dict(self) -> dict:
        return {"u": self.u.tolist(), "v": self.v.tolist(), "a": self.a.tolist()}

    def __eq__(self, other):
        if not isinstance(other, PiecewiseProblem):
            return NotImplemented
        return (
            np.array_equal(self.u, other.u)
            and np.array_equal(self.v, other.v)
            and np.array_equal(self.a, other.a)
        )

    def __hash__(self):
        return hash((self.u.tobytes(), self.v.tobytes(), self.a.tobytes()))


def _as_vector(values, name: str) -> np.ndarray:
    try:
        arr = np.asarray(values, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ProblemError(f"field {name!r}: not a list of numbers", field=name) from exc
    if arr.ndim != 1:
        raise ProblemError(f"field {name!r}: expected a flat list", field=name)
    if not np.all(np.isfinite(arr)):
        raise ProblemError(f"field {name!r}: non-finite entry", field=name)
    return arr


def validate(u: Sequence[float], v: Sequence[float], a: Sequence[float]) -> PiecewiseProblem:
    """Check raw problem data and return an immutable :class:`PiecewiseProblem`.

    Raises
    ------
    LengthMismatch
        Unless ``len(u) == len(v) + 1 == len(a) + 1`` with ``len(v) >= 1``.
    NonIncreasingBreakpoints
        If ``u`` is not strictly increasing (exact comparison).
    NegativeDiffusion
        If some ``a_k < 0``.
    """
    u = _as_vector(u, "u")
    v = _as_vector(v, "v")
    a = _as_vector(a, "a")
    if len(v) < 1:
        raise LengthMismatch("field 'v': need at least one interval", field="v")
    if len(u) != len(v) + 1:
        raise LengthMismatch(
            f"field 'u': expected {len(v) + 1} breakpoints, got {len(u)}", field="u"
        )
    if len(a) != len(v):
        raise LengthMismatch(f"field 'a': expected {len(v)} entries, got {len(a)}", field="a")
    if np.any(np.diff(u) <= 0):
        raise NonIncreasingBreakpoints("field 'u': breakpoints must strictly increase", field="u")
    if np.any(a < 0):
        raise NegativeDiffusion("field 'a': diffusion must be nonnegative", field="a")

    du = np.diff(u)
    phi_nodes = np.concatenate([[0.0], np.cumsum(v * du)])
    A_nodes = np.concatenate([[0.0], np.cumsum(a * a * du)])
    fluxes = FluxFunctions(_frozen(u), _frozen(phi_nodes), _frozen(A_nodes))
    return PiecewiseProblem(_frozen(u), _frozen(v), _frozen(a), fluxes)


def problem_from_dict(data: Mapping) -> PiecewiseProblem:
    if not isinstance(data, Mapping):
        raise ProblemError("problem must be a JSON object with fields u, v, a")
    for name in ("u", "v", "a"):
        if name not in data:
            raise ProblemError(f"field {name!r}: missing", field=name)
        if not isinstance(data[name], list):
            raise ProblemError(f"field {name!r}: expected a list", field=name)
        for item in data[name]:
            if isinstance(item, bool) or not isinstance(item, (int, float)):
                raise ProblemError(f"field {name!r}: non-numeric entry {item!r}", field=name)
    return validate(data["u"], data["v"], data["a"])


def load_problem(path) -> PiecewiseProblem:
    """Read a ``{"u": [...], "v": [...], "a": [...]}`` JSON problem file."""
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemError(f"{path}: invalid JSON ({exc.msg})") from exc
    return problem_from_dict(data)


def max_speed(problem: PiecewiseProblem) -> float:
    return float(np.max(np.abs(problem.v)))


def max_diffusion(problem: PiecewiseProblem) -> float:
    return float(np.max(problem.a))


def is_hyperbolic(problem: PiecewiseProblem) -> bool:
    """True when every ``a_k`` vanishes (a plain conservation law)."""
    return not np.any(problem.a > 0)


__all__ = [
    "FluxFunctions",
    "PiecewiseProblem",
    "validate",
    "problem_from_dict",
    "load_problem",
    "max_speed",
    "max_diffusion",
    "is_hyperbolic",
]
