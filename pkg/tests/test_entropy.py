import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riemann_entropy.entropy import (
    E,
    E1,
    E_gradient,
    E_hessian,
    coercivity_box,
    continuum_J,
    p_hessian,
)
from riemann_entropy.errors import (
    DegenerateGap,
    DimensionMismatch,
    InfeasiblePoint,
    NegativeLevel,
    NonMonotoneSamples,
)
from riemann_entropy.model import validate
from riemann_entropy.stats import F_inverse
from suite import random_feasible, suite


def test_E_zero_at_target():
    assert E(validate([0, 1], [0], [0]), [0.0]) == 0.0


def test_E_merged_shock():
    assert E(validate([0, 0.5, 1], [1, -1], [0, 0]), [0.0, 0.0]) == 0.5


def test_E_linear_case_empty_vector():
    p = validate([0, 1], [0], [1])
    assert E(p, []) == 0.0
    assert E1(p, []) == 0.0


def test_E_against_mpmath():
    p = validate([0, 0.7, 1.5, 2.0], [0.3, -0.4, 1.1], [0.8, 0.0, 0.5])
    xi = [-0.2, 0.4]
    mpmath.mp.dps = 40
    F = mpmath.ncdf
    expected = (
        -(0.8**2) * 0.7 * mpmath.log(F((xi[0] - 0.3) / 0.8))
        + 0.5 * 0.8 * (xi[1] + 0.4) ** 2
        - (0.5**2) * 0.5 * mpmath.log(1 - F((xi[1] - 1.1) / 0.5))
    )
    assert E(p, xi) == pytest.approx(float(expected), rel=1e-14)


def test_E_dimension_and_feasibility():
    p = validate([0, 1, 2], [0, 0], [0, 0])
    with pytest.raises(DimensionMismatch):
        E(p, [0.0])
    with pytest.raises(InfeasiblePoint):
        E(p, [1.0, 0.0])


def test_E_infinite_on_closed_diffusive_gap():
    p = validate([0, 1, 2, 3], [0, 0, 0], [0, 1, 0])
    assert E(p, [0.5, 0.5, 1.0]) == math.inf
    with pytest.raises(DegenerateGap):
        E_gradient(p, [0.5, 0.5, 1.0])


def test_gradient_hyperbolic_example():
    assert E_gradient(validate([0, 1], [5], [0]), [7.0])[0] == pytest.approx(2.0, rel=1e-15)


def test_gradient_symmetric_example():
    g = E_gradient(validate([0, 1, 2], [0, 0], [1, 1]), [0.0])
    assert abs(g[0]) < 1e-15


def test_hessian_quadratic_case():
    h = E_hessian(validate([0, 1], [0], [0]), [0.37]).toarray()
    assert h.shape == (1, 1) and h[0, 0] == 1.0


def test_E1_constant_shift():
    p = validate([0, 0.5, 1.2, 2], [0.1, -0.3, 0.4], [0.5, 0.0, 1.2])
    a, b = np.array([-0.5, 0.2]), np.array([0.1, 0.9])
    assert E1(p, a) - E1(p, b) == pytest.approx(E(p, a) - E(p, b), abs=1e-12)


def test_E1_equals_E_when_hyperbolic():
    p = validate([0, 1, 3], [1, 0], [0, 0])
    assert E1(p, [0.5, 0.7]) == E(p, [0.5, 0.7])


def test_barrier_blows_up():
    p = validate([0, 1, 2, 3], [0, 0, 0], [0, 1, 0])
    vals = [E(p, [0.0, w, w]) for w in (1.0, 1e-2, 1e-4, 1e-8)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_coercivity_example():
    box = coercivity_box(validate([0, 1, 2], [0, 0], [1, 0]), 2.0)
    assert box.delta == pytest.approx(math.exp(-2), rel=1e-15)
    assert box.r1 == pytest.approx(-2.0, rel=1e-15)
    assert box.r2 == pytest.approx(2.0, rel=1e-15)
    assert F_inverse(box.delta) == pytest.approx(-1.10151962849875, abs=1e-12)


def test_coercivity_zero_level():
    box = coercivity_box(validate([0, 1], [3], [0]), 0.0)
    assert box.r1 == 3.0 == box.r2


def test_coercivity_errors():
    with pytest.raises(NegativeLevel):
        coercivity_box(validate([0, 1], [3], [0]), -1.0)
    with pytest.raises(DimensionMismatch):
        coercivity_box(validate([0, 1], [3], [1]), 1.0)


@pytest.mark.parametrize("x, y", [(0.3, -0.2), (5.0, 4.0), (-7.0, -9.0), (math.inf, 1.0), (2.0, -math.inf), (8.0, -8.0)])
def test_P_hessian_positive_definite(x, y):
    h = p_hessian(x, y)
    finite = [i for i, z in enumerate((x, y)) if math.isfinite(z)]
    sub = h[np.ix_(finite, finite)]
    assert np.all(np.linalg.eigvalsh(sub) > 0)


@pytest.mark.parametrize("z", [-30.0, -2.0, 0.0, 3.0, 30.0])
def test_one_sided_P_convex(z):
    # -ln F(x) and -ln(1 - F(x)) have positive second derivative
    assert p_hessian(z, -math.inf)[0, 0] > 0
    assert p_hessian(math.inf, z)[1, 1] > 0


@pytest.mark.parametrize("problem", suite(8, seed=31), ids=lambda p: f"n{p.n}")
def test_convex_along_segments(problem):
    rng = np.random.default_rng(3)
    for _ in range(20):
        p, q = random_feasible(problem, rng), random_feasible(problem, rng)
        t = rng.uniform()
        mid = t * p + (1 - t) * q
        assert E(problem, mid) <= t * E(problem, p) + (1 - t) * E(problem, q) + 1e-10
        assert E(problem, p) >= 0


def test_continuum_J_trivial():
    u = np.linspace(0, 1, 50)
    assert continuum_J(lambda s: 0.7 + 0 * s, lambda s: 0 * s, u, 0.7 + 0 * u) == 0.0


def test_continuum_J_inverse_cdf():
    # J for v = 0, a = 1, xi = F^{-1}: integrand F^{-1}(u)^2/2 + ln(f(F^{-1}(u))) + ln sqrt(2 pi)
    # = F^{-1}(u)^2/2 - F^{-1}(u)^2/2 = 0 in normalized form
    u = np.linspace(1e-6, 1 - 1e-6, 20001)
    xi = np.array([F_inverse(x) for x in u])
    J = continuum_J(lambda s: 0 * s, lambda s: 1 + 0 * s, u, xi)
    assert abs(J) < 1e-3
    raw = continuum_J(lambda s: 0 * s, lambda s: 1 + 0 * s, u, xi, normalized=False)
    assert J - raw == pytest.approx(0.5 * math.log(2 * math.pi) * (u[-1] - u[0]), rel=1e-12)


def test_continuum_J_rejects_bad_samples():
    u = np.linspace(0, 1, 10)
    with pytest.raises(NonMonotoneSamples):
        continuum_J(np.sin, np.cos, u[::-1], u)
    with pytest.raises(NonMonotoneSamples):
        continuum_J(np.sin, np.cos, u, -u)
    with pytest.raises(NonMonotoneSamples):
        continuum_J(np.sin, lambda s: 1 + 0 * s, u, np.zeros(10))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_gradient_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    problem = suite(1, seed=seed)[0]
    xi = random_feasible(problem, rng, scale=1.5)
    g = E_gradient(problem, xi)
    step = 1e-6
    for i in range(problem.d):
        e = np.zeros(problem.d)
        e[i] = step
        lo, hi = xi - e, xi + e
        if E(problem, lo) == math.inf or np.any(np.diff(lo) < 0) or np.any(np.diff(hi) < 0):
            continue
        fd = (E(problem, hi) - E(problem, lo)) / (2 * step)
        assert fd == pytest.approx(g[i], rel=1e-5, abs=1e-6 * (1 + abs(E(problem, xi))))
