"""Jump-condition certificate for a self-similar profile.

Each maximal group ``xi_k = ... = xi_l = c`` is checked against

* ``A(u(c+)) = A(u(c-))``,
* the Rankine-Hugoniot balance
  ``sum_{i=k'}^{l-1} (v_i - xi_{i+1}) du_i - (A(u)'(c+) - A(u)'(c-)) = 0``,
* the Oleinik chord inequalities at the nodal states between ``u_{k'}`` and
  ``u_l``: ``sum_{i=j}^{l-1} (v_i - xi_{i+1}) du_i - A(u)'(c+) <= 0``
  for ``k' < j < l``.

Only profile data and the flux ``A`` are used; the entropy and its gradient are
deliberately not consulted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import WrongConfiguration
from .profile import Discontinuity, SelfSimilarProfile


@dataclass(frozen=True)
class JumpCheck:
    jump: Discontinuity
    rh_A_residual: float
    rh_flux_residual: float
    oleinik_margins: list  # -(chord sum) at each nodal j; >= 0 when admissible
    config: str
    config_residual: float

    def to_dict(self) -> dict:
        out = self.jump.to_dict()
        out.update(
            rh_A_residual=self.rh_A_residual,
            rh_flux_residual=self.rh_flux_residual,
            oleinik_margins=list(self.oleinik_margins),
            config=self.config,
            config_residual=self.config_residual,
        )
        return out


@dataclass(frozen=True)
class VerificationReport:
    per_jump: list
    max_equality_residual: float
    min_inequality_margin: float
    tol: float
    passed: bool = field(init=False)

    def __post_init__(self):
        ok = self.max_equality_residual <= self.tol and self.min_inequality_margin >= -self.tol
        object.__setattr__(self, "passed", bool(ok))

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "tol": self.tol,
            "max_equality_residual": self.max_equality_residual,
            "min_inequality_margin": self.min_inequality_margin,
            "jumps": [j.to_dict() for j in self.per_jump],
        }


def default_tol(profile: SelfSimilarProfile) -> float:
    """``1e-8 (1 + max|v|) (beta - alpha)``."""
    p = profile.problem
    return 1e-8 * (1.0 + float(np.max(np.abs(p.v)))) * (p.beta - p.alpha)


def _chord(profile: SelfSimilarProfile, j: int, l: int) -> float:
    # sum_{i=j}^{l-1} (v_i - xi_{i+1}) du_i
    p = profile.problem
    xi = profile.xi
    i = np.arange(j, l)
    return float(np.sum((p.v[i] - xi[i + 1]) * p.du[i]))


def _config(profile: SelfSimilarProfile, jump: Discontinuity) -> str:
    if jump.l > jump.k:
        return "group"
    a = profile.problem
    left = a.diffusion(jump.k - 1) > 0
    right = a.diffusion(jump.k) > 0
    return {(True, True): "c++", (True, False): "c+0", (False, True): "c0+", (False, False): "c00"}[
        (left, right)
    ]


def _check_jump(profile: SelfSimilarProfile, jump: Discontinuity) -> JumpCheck:
    p = profile.problem
    rh_A = abs(float(p.A(jump.u_plus)) - float(p.A(jump.u_minus)))
    rh = _chord(profile, jump.k_prime, jump.l) - (jump.Aflux_plus - jump.Aflux_minus)
    margins = [
        -(_chord(profile, j, jump.l) - jump.Aflux_plus) for j in range(jump.k_prime + 1, jump.l)
    ]
    config = _config(profile, jump)
    if config == "c00":
        # (v_{k-1} - xi_k) du_{k-1} = 0 reduces to xi_k = v_{k-1}
        config_residual = float(profile.xi[jump.k] - p.v[jump.k - 1])
    else:
        config_residual = rh
    return JumpCheck(jump, rh_A, float(rh), margins, config, float(config_residual))


def verify(profile: SelfSimilarProfile, tol: float | None = None) -> VerificationReport:
    """Check every discontinuity of ``profile``; the report is always produced.

    ``tol`` defaults to :func:`default_tol`. The report passes when the largest
    equality residual is at most ``tol`` and the smallest Oleinik margin is at
    least ``-tol``.
    """
    if tol is None:
        tol = default_tol(profile)
    checks = [_check_jump(profile, j) for j in profile.discontinuities()]
    eq = [0.0]
    ineq = [float("inf")]
    for c in checks:
        eq += [c.rh_A_residual, abs(c.rh_flux_residual)]
        ineq += c.oleinik_margins
    return VerificationReport(checks, float(max(eq)), float(min(ineq)), float(tol))


def _isolated(profile: SelfSimilarProfile, k: int) -> Discontinuity:
    for jump in profile.discontinuities():
        if jump.k <= k <= jump.l:
            if jump.k != jump.l:
                raise WrongConfiguration(f"xi_{k} belongs to the group xi_{jump.k}..xi_{jump.l}")
            return jump
    raise WrongConfiguration(f"no speed xi_{k}; d = {profile.d}")


def check_cpp_condition(profile: SelfSimilarProfile, k: int) -> float:
    """``A(u)'(xi_k+) - A(u)'(xi_k-)`` at an isolated ``xi_k`` with ``a_{k-1}, a_k > 0``."""
    jump = _isolated(profile, k)
    p = profile.problem
    if not (p.diffusion(k - 1) > 0 and p.diffusion(k) > 0):
        raise WrongConfiguration(f"xi_{k} is not between two diffusive intervals")
    return jump.Aflux_plus - jump.Aflux_minus


def check_c0p_condition(profile: SelfSimilarProfile, k: int) -> float:
    """``(v_{k-1} - xi_k) du_{k-1} - A(u)'(xi_k+)`` at an isolated ``xi_k`` with
    ``a_{k-1} = 0 < a_k``."""
    jump = _isolated(profile, k)
    p = profile.problem
    if not (p.diffusion(k - 1) == 0 and p.diffusion(k) > 0):
        raise WrongConfiguration(f"xi_{k} does not have a_(k-1) = 0 < a_k")
    return float((p.v[k - 1] - profile.xi[k]) * p.du[k - 1] - jump.Aflux_plus)


__all__ = [
    "JumpCheck",
    "VerificationReport",
    "default_tol",
    "verify",
    "check_cpp_condition",
    "check_c0p_condition",
]
