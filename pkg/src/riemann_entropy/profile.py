"""Self-similar profile ``u(xi)`` built from a speed vector.

On ``xi_k < xi < xi_{k+1}`` (``k = 0, ..., d`` with infinite outer speeds) the
profile is either the constant ``u_k`` (``a_k = 0``) or the rescaled normal CDF

    u_k + du_k (F(z) - F(z_k)) / (F(z_{k+1}) - F(z_k)),   z = (xi - v_k)/a_k.

Pieces between coinciding speeds are empty; they stay in the table so that
piece ``k`` always belongs to interval ``k``.
"""

from __future__ import annotations

import bisect
import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import BadWindow, DegenerateGap, DimensionMismatch, InfeasiblePoint
from .model import PiecewiseProblem
from .stats import gap_ratio, log_F_gap


@dataclass(frozen=True)
class ConstPiece:
    k: int
    value: float


@dataclass(frozen=True)
class ErfPiece:
    """Normal-CDF piece; ``log_normalizer = ln(F(z_hi) - F(z_lo))``."""

    k: int
    u_lo: float
    u_hi: float
    v: float
    a: float
    z_lo: float
    z_hi: float
    log_normalizer: float

    @property
    def normalizer(self) -> float:
        return math.exp(self.log_normalizer)

    def z(self, xi: float) -> float:
        return (xi - self.v) / self.a

    def value(self, xi: float) -> float:
        z = self.z(xi)
        if z <= self.z_lo:
            return self.u_lo
        if z >= self.z_hi:
            return self.u_hi
        du = self.u_hi - self.u_lo
        lower = math.exp(log_F_gap(z, self.z_lo) - self.log_normalizer)
        if lower <= 0.5:
            return self.u_lo + du * lower
        # the complement is the accurate side near the top of the piece
        upper = math.exp(log_F_gap(self.z_hi, z) - self.log_normalizer)
        return self.u_hi - du * upper

    def slope(self, xi: float) -> float:
        """``u'(xi)``."""
        z = self.z(xi)
        return (self.u_hi - self.u_lo) / self.a * gap_ratio(z, self.log_normalizer)

    def edge_flux(self, z: float) -> float:
        """One-sided ``A(u)'`` at a piece end, ``a du F'(z) / G``."""
        return self.a * (self.u_hi - self.u_lo) * gap_ratio(z, self.log_normalizer)


@dataclass(frozen=True)
class Discontinuity:
    """A maximal group ``xi_k = ... = xi_l = c`` (indices 1-based).

    ``k_prime`` is ``k`` when ``a_{k-1} > 0`` and ``k - 1`` otherwise; it
    indexes the left state ``u_minus = u_{k'}``, while ``u_plus = u_l``.
    """

    c: float
    k: int
    l: int
    k_prime: int
    u_minus: float
    u_plus: float
    Aflux_minus: float
    Aflux_plus: float

    @property
    def kind(self) -> str:
        return "strong" if self.u_plus > self.u_minus else "weak"

    def to_dict(self) -> dict:
        return {
            "c": self.c,
            "k": self.k,
            "l": self.l,
            "k_prime": self.k_prime,
            "u_minus": self.u_minus,
            "u_plus": self.u_plus,
            "Aflux_minus": self.Aflux_minus,
            "Aflux_plus": self.Aflux_plus,
            "kind": self.kind,
        }


@dataclass(frozen=True)
class SelfSimilarProfile:
    problem: PiecewiseProblem
    xi: np.ndarray  # padded: xi[0] = -inf, xi[d + 1] = +inf
    pieces: tuple

    @property
    def d(self) -> int:
        return len(self.xi) - 2

    @property
    def speeds(self) -> np.ndarray:
        return self.xi[1:-1]

    def piece_index(self, point: float) -> int:
        """Index of the piece that owns ``point`` under right-continuity."""
        k = bisect.bisect_right(self.xi, point) - 1
        return min(max(k, 0), self.d)

    def _eval_scalar(self, point: float) -> float:
        if math.isnan(point):
            return math.nan
        piece = self.pieces[self.piece_index(point)]
        if isinstance(piece, ConstPiece):
            return piece.value
        return piece.value(point)

    def eval(self, points):
        """Profile value(s); right-continuous at jumps, total on the extended line."""
        arr = np.asarray(points, dtype=float)
        if arr.ndim == 0:
            return self._eval_scalar(float(arr))
        return np.array([self._eval_scalar(p) for p in arr.reshape(-1)]).reshape(arr.shape)

    __call__ = eval

    def derivatives(self, point: float) -> tuple[float, float]:
        """``(u', u'')`` at an interior point of a piece.

        Inside a normal-CDF piece ``u'' = -(xi - v_k)/a_k**2 u'``; constant
        pieces give zeros.
        """
        piece = self.pieces[self.piece_index(point)]
        if isinstance(piece, ConstPiece):
            return 0.0, 0.0
        d1 = piece.slope(point)
        return d1, -piece.z(point) / piece.a * d1

    def ode_residual(self, point: float) -> float:
        """``(v_k - xi) u' - a_k**2 u''`` inside the owning piece."""
        piece = self.pieces[self.piece_index(point)]
        if isinstance(piece, ConstPiece):
            return 0.0
        d1, d2 = self.derivatives(point)
        return (piece.v - point) * d1 - piece.a**2 * d2

    def _left_flux(self, k: int) -> float:
        # A(u)' just left of xi_k, from piece k-1
        piece = self.pieces[k - 1]
        if isinstance(piece, ConstPiece):
            return 0.0
        return piece.edge_flux(piece.z_hi)

    def _right_flux(self, l: int) -> float:
        # A(u)' just right of xi_l, from piece l
        piece = self.pieces[l]
        if isinstance(piece, ConstPiece):
            return 0.0
        return piece.edge_flux(piece.z_lo)

    def discontinuities(self) -> list[Discontinuity]:
        """One entry per maximal group of coinciding finite speeds, left to right."""
        out = []
        u = self.problem.u
        a = self.problem.a
        speeds = self.speeds
        j = 0
        while j < len(speeds):
            k = j + 1
            while j + 1 < len(speeds) and speeds[j + 1] == speeds[j]:
                j += 1
            l = j + 1
            k_prime = k if a[k - 1] > 0 else k - 1
            out.append(
                Discontinuity(
                    c=float(speeds[k - 1]),
                    k=k,
                    l=l,
                    k_prime=k_prime,
                    u_minus=float(u[k_prime]),
                    u_plus=float(u[l]),
                    Aflux_minus=self._left_flux(k),
                    Aflux_plus=self._right_flux(l),
                )
            )
            j += 1
        return out

    def sample(self, xi_min: float, xi_max: float, count: int) -> "SampleTable":
        """Equispaced samples on ``[xi_min, xi_max]`` plus both sides of each jump.

        A strong jump at ``c`` inside the window contributes the rows
        ``(c, u_minus, "minus")`` and ``(c, u_plus, "plus")``. Rows are sorted
        by ``xi`` with the minus row first.
        """
        if not (math.isfinite(xi_min) and math.isfinite(xi_max)) or not xi_min < xi_max:
            raise BadWindow(f"need finite xi_min < xi_max, got [{xi_min!r}, {xi_max!r}]")
        if int(count) != count or count < 2:
            raise BadWindow(f"count must be an integer >= 2, got {count!r}")
        grid = np.linspace(xi_min, xi_max, int(count))
        jumps = [
            j for j in self.discontinuities() if j.kind == "strong" and xi_min <= j.c <= xi_max
        ]
        jump_at = {j.c for j in jumps}
        rows = [(float(x), float(self._eval_scalar(x)), "") for x in grid if x not in jump_at]
        for j in jumps:
            rows.append((j.c, j.u_minus, "minus"))
            rows.append((j.c, j.u_plus, "plus"))
        order = {"minus": 0, "": 1, "plus": 2}
        rows.sort(key=lambda r: (r[0], order[r[2]]))
        return SampleTable(
            np.array([r[0] for r in rows]),
            np.array([r[1] for r in rows]),
            tuple(r[2] for r in rows),
        )

    def inverse_table(self, xi_min: float, xi_max: float, count: int):
        """Samples of the inverse ``xi(u)`` for strictly increasing profiles.

        Returns ``(u, xi)`` with ``u`` strictly increasing; grid points where
        the floating-point value of ``u`` repeats are dropped.
        """
        table = self.sample(xi_min, xi_max, count)
        u, xi = table.u, table.xi
        keep = np.concatenate([[True], np.diff(u) > 0])
        return u[keep], xi[keep]


@dataclass(frozen=True)
class SampleTable:
    xi: np.ndarray
    u: np.ndarray
    side: tuple

    def __len__(self) -> int:
        return len(self.xi)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["xi", "u", "side"])
        for x, u, s in zip(self.xi, self.u, self.side):
            writer.writerow([format_float(x), format_float(u), s])
        return buf.getvalue()

    def to_records(self) -> list[dict]:
        return [
            {"xi": float(x), "u": float(u), "side": s}
            for x, u, s in zip(self.xi, self.u, self.side)
        ]

    @classmethod
    def from_csv(cls, text: str) -> "SampleTable":
        reader = csv.DictReader(io.StringIO(text))
        rows = list(reader)
        return cls(
            np.array([float(r["xi"]) for r in rows]),
            np.array([float(r["u"]) for r in rows]),
            tuple(r["side"] for r in rows),
        )


def format_float(x: float) -> str:
    """Shortest text that round-trips at 17 significant digits."""
    return "%.17g" % x


def build(problem: PiecewiseProblem, xi) -> SelfSimilarProfile:
    """Assemble the piece table for the speeds ``xi``.

    Raises
    ------
    DegenerateGap
        If a diffusive piece has zero width (coinciding speeds across an
        interval with ``a_k > 0``).
    """
    xi = np.asarray(xi, dtype=float).reshape(-1)
    d = problem.d
    if xi.shape[0] != d:
        raise DimensionMismatch(f"expected {d} speeds, got {xi.shape[0]}")
    if not np.all(np.isfinite(xi)) or np.any(np.diff(xi) < 0):
        raise InfeasiblePoint("speeds must be finite and nondecreasing")
    full = np.concatenate([[-math.inf], xi, [math.inf]])
    full.setflags(write=False)
    u = problem.u
    pieces = []
    for k in range(d + 1):
        a = problem.diffusion(k)
        if a == 0.0:
            pieces.append(ConstPiece(k, float(u[k])))
            continue
        v = float(problem.v[k])
        z_lo = (full[k] - v) / a
        z_hi = (full[k + 1] - v) / a
        if not z_hi > z_lo:
            raise DegenerateGap(f"piece {k}: zero width with a_k > 0")
        pieces.append(
            ErfPiece(k, float(u[k]), float(u[k + 1]), v, a, z_lo, z_hi, log_F_gap(z_hi, z_lo))
        )
    return SelfSimilarProfile(problem, full, tuple(pieces))


__all__ = [
    "ConstPiece",
    "ErfPiece",
    "Discontinuity",
    "SelfSimilarProfile",
    "SampleTable",
    "build",
    "format_float",
]
