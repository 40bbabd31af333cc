import numpy as np
import pytest

from riemann_entropy.errors import GridMismatch, UnstableParameters
from riemann_entropy.fd_oracle import compare, min_half_width, solve_fd
from riemann_entropy.model import validate
from riemann_entropy.optimizer import minimize
from riemann_entropy.profile import build
from suite import mixed_suite

LINEAR = validate([0, 1], [0], [1])
SHOCK = validate([0, 1], [3], [0])


def errors(problem, xi, hs):
    pr = build(problem, xi)
    return np.array([compare(solve_fd(problem, h=h), pr).l1_error for h in hs])


def test_linear_case_converges_first_order():
    e = errors(LINEAR, [], [0.02, 0.01, 0.005])
    assert np.all(np.log2(e[:-1] / e[1:]) >= 0.8)
    assert e[-1] <= 0.02


def test_contact_converges_half_order():
    e = errors(SHOCK, [3.0], [0.02, 0.01, 0.005])
    orders = np.log2(e[:-1] / e[1:])
    assert np.all(np.abs(orders - 0.5) < 0.05)


def test_wrong_speed_is_detected():
    right = errors(SHOCK, [3.0], [0.01, 0.005])
    wrong = errors(SHOCK, [2.8], [0.01, 0.005])
    assert wrong[-1] > 0.15 and wrong[-1] > 0.9 * wrong[0]
    assert right[-1] < 0.5 * wrong[-1]


def test_constant_data():
    p = validate([0, 1e-12], [2], [1])
    fd = solve_fd(p, h=0.05)
    assert np.all(np.abs(fd.values - fd.initial) <= 1e-12)


@pytest.mark.parametrize("problem", mixed_suite(4, seed=21), ids=lambda p: f"n{p.n}")
def test_scheme_invariants(problem):
    fd = solve_fd(problem, h=0.01, t_final=1.0)
    assert np.all(fd.values >= problem.alpha) and np.all(fd.values <= problem.beta)
    assert np.all(np.diff(fd.values) >= 0)
    assert abs(fd.mass_defect()) <= 1e-10 * fd.t_final
    assert fd.L >= min_half_width(problem, 1.0)
    # x = 0 is a face
    assert np.any(np.isclose(fd.x_centers, fd.h / 2))


def test_refinement_reduces_error_on_mixed_suite():
    for problem in mixed_suite(3, seed=21):
        e = errors(problem, minimize(problem).xi, [0.02, 0.01])
        assert e[1] < e[0]


@pytest.mark.parametrize(
    "kwargs",
    [dict(cfl=1.0), dict(cfl=0.0), dict(h=-0.1), dict(t_final=0.0), dict(L=1.0)],
)
def test_unstable_parameters(kwargs):
    with pytest.raises(UnstableParameters):
        solve_fd(SHOCK, **kwargs)


def test_compare_rejects_other_problem():
    fd = solve_fd(SHOCK, h=0.05)
    with pytest.raises(GridMismatch):
        compare(fd, build(LINEAR, []))


def test_deterministic_and_csv():
    a = solve_fd(SHOCK, h=0.05)
    b = solve_fd(SHOCK, h=0.05)
    assert a.to_csv() == b.to_csv()
    assert a.to_csv().splitlines()[0] == "x,u"
