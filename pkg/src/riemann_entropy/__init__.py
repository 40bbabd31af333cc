"""Entropy solutions of Riemann problems for ``u_t + v(u) u_x - t (a(u)**2 u_x)_x = 0``
with piecewise-constant ``v`` and ``a``.

The solution is self-similar, ``u = u(x/t)``, and is fixed by a vector of
discontinuity speeds that minimises a strictly convex entropy over an ordered
cone. Typical use::

    problem = validate(u=[0, 0.5, 1], v=[1, -1], a=[0, 0.3])
    result = minimize(problem)
    profile = build(problem, result.xi)
    assert verify(profile).passed
"""

from .entropy import E, E1, E_gradient, E_hessian, coercivity_box, continuum_J
from .errors import *  # noqa: F401,F403
from .fd_oracle import compare, solve_fd
from .model import PiecewiseProblem, load_problem, validate
from .optimizer import kkt_check, minimize, pava
from .profile import SelfSimilarProfile, build
from .verifier import check_c0p_condition, check_cpp_condition, verify

__version__ = "0.1.0"

__all__ = [
    "PiecewiseProblem",
    "validate",
    "load_problem",
    "E",
    "E1",
    "E_gradient",
    "E_hessian",
    "coercivity_box",
    "continuum_J",
    "pava",
    "minimize",
    "kkt_check",
    "SelfSimilarProfile",
    "build",
    "verify",
    "check_cpp_condition",
    "check_c0p_condition",
    "solve_fd",
    "compare",
]
